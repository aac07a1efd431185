// Wire formats of the errandbot service API (snake_case, stable).

export interface Point {
  x: number;
  y: number;
}

export interface TaskInfo {
  command_id: string;
  issued_at: number;
  item: string;
  pickup: { name: string; position: Point };
  delivery: { name: string; position: Point };
}

export interface PedestrianInfo {
  id: number;
  position: Point;
  velocity: Point;
  radius: number;
  waypoint: Point;
  speed: number;
}

export interface ExecutorInfo {
  state: string;
  active_task: TaskInfo | null;
  queue: TaskInfo[];
  carried_item: string | null;
  history: { t: number; state: string; event: string }[];
}

export interface WorldSnapshot {
  tick: number;
  sim_time: number;
  robot: {
    pose: { x: number; y: number; heading: number };
    command: { linear: number; angular: number };
  };
  pedestrians: PedestrianInfo[];
  executor: ExecutorInfo;
  path: { waypoints: Point[]; total_cost: number } | null;
  collisions_so_far: number;
  emergency_stops_so_far: number;
}

export interface LandmarkInfo {
  name: string;
  aliases: string[];
  position: Point;
}

export interface MapInfo {
  resolution: number;
  origin: Point;
  width: number;
  height: number;
  rows: string[]; // top-to-bottom, '.' free / '#' occupied
}

export interface WorldInfo {
  landmarks: LandmarkInfo[];
  map: MapInfo;
}

export interface CommandAccepted {
  command_id: string;
  task: TaskInfo;
}

export interface CommandRejected {
  error: string;
  detail: string;
}
