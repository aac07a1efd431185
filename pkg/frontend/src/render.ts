// Immediate-mode canvas renderer: one full redraw per stream frame (10 Hz).

import { Transform, worldToScreen } from "./transform";
import { WorldInfo, WorldSnapshot } from "./types";

const COLORS = {
  background: "#10141a",
  free: "#1b222c",
  occupied: "#3d4654",
  gridLine: "#141a22",
  landmark: "#e8b84b",
  landmarkText: "#e6e1d3",
  path: "#4ba3e8",
  robot: "#5fd38a",
  robotOutline: "#2a7b4f",
  pedestrian: "#e86a5f",
  pedestrianTick: "#f3b3ad",
  goal: "#4ba3e8",
};

export function render(
  ctx: CanvasRenderingContext2D,
  world: WorldInfo,
  snapshot: WorldSnapshot | null,
  t: Transform,
): void {
  const { map } = world;
  const canvas = ctx.canvas;
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, canvas.width, canvas.height);

  const cell = map.resolution * t.scale;
  for (let row = 0; row < map.height; row++) {
    const line = map.rows[row]; // rows listed top-to-bottom
    const yTop = map.origin.y + (map.height - row) * map.resolution;
    for (let col = 0; col < map.width; col++) {
      const x = map.origin.x + col * map.resolution;
      const [sx, sy] = worldToScreen(t, x, yTop);
      ctx.fillStyle = line[col] === "#" ? COLORS.occupied : COLORS.free;
      ctx.fillRect(sx, sy, cell + 0.5, cell + 0.5);
    }
  }

  ctx.font = "12px system-ui, sans-serif";
  for (const lm of world.landmarks) {
    const [sx, sy] = worldToScreen(t, lm.position.x, lm.position.y);
    ctx.fillStyle = COLORS.landmark;
    ctx.beginPath();
    ctx.arc(sx, sy, 4, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = COLORS.landmarkText;
    ctx.fillText(lm.name, sx + 7, sy - 5);
  }

  if (!snapshot) return;

  if (snapshot.path && snapshot.path.waypoints.length > 1) {
    ctx.strokeStyle = COLORS.path;
    ctx.lineWidth = 2;
    ctx.beginPath();
    snapshot.path.waypoints.forEach((w, i) => {
      const [sx, sy] = worldToScreen(t, w.x, w.y);
      if (i === 0) ctx.moveTo(sx, sy);
      else ctx.lineTo(sx, sy);
    });
    ctx.stroke();
  }

  for (const ped of snapshot.pedestrians) {
    const [sx, sy] = worldToScreen(t, ped.position.x, ped.position.y);
    ctx.fillStyle = COLORS.pedestrian;
    ctx.beginPath();
    ctx.arc(sx, sy, ped.radius * t.scale, 0, 2 * Math.PI);
    ctx.fill();
    // velocity tick: half a second of travel
    ctx.strokeStyle = COLORS.pedestrianTick;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.moveTo(sx, sy);
    const [tx, ty] = worldToScreen(
      t,
      ped.position.x + ped.velocity.x * 0.5,
      ped.position.y + ped.velocity.y * 0.5,
    );
    ctx.lineTo(tx, ty);
    ctx.stroke();
  }

  const robot = snapshot.robot.pose;
  const [rx, ry] = worldToScreen(t, robot.x, robot.y);
  const radius = 0.3 * t.scale;
  ctx.fillStyle = COLORS.robot;
  ctx.strokeStyle = COLORS.robotOutline;
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.arc(rx, ry, radius, 0, 2 * Math.PI);
  ctx.fill();
  ctx.stroke();
  // heading triangle
  const h = robot.heading;
  const tip = worldToScreen(t, robot.x + 0.42 * Math.cos(h), robot.y + 0.42 * Math.sin(h));
  const left = worldToScreen(
    t,
    robot.x + 0.18 * Math.cos(h + 2.4),
    robot.y + 0.18 * Math.sin(h + 2.4),
  );
  const right = worldToScreen(
    t,
    robot.x + 0.18 * Math.cos(h - 2.4),
    robot.y + 0.18 * Math.sin(h - 2.4),
  );
  ctx.fillStyle = COLORS.robotOutline;
  ctx.beginPath();
  ctx.moveTo(tip[0], tip[1]);
  ctx.lineTo(left[0], left[1]);
  ctx.lineTo(right[0], right[1]);
  ctx.closePath();
  ctx.fill();

  const goal = activeGoal(snapshot);
  if (goal) {
    const [gx, gy] = worldToScreen(t, goal.x, goal.y);
    ctx.strokeStyle = COLORS.goal;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.arc(gx, gy, 8, 0, 2 * Math.PI);
    ctx.stroke();
  }
}

function activeGoal(snapshot: WorldSnapshot): { x: number; y: number } | null {
  const task = snapshot.executor.active_task;
  if (!task) return null;
  if (snapshot.executor.state === "NavigatingToPickup") return task.pickup.position;
  if (snapshot.executor.state === "NavigatingToDelivery") return task.delivery.position;
  return null;
}
