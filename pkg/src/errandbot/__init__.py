"""errandbot: text-commanded pick-and-delivery robot simulation.

Natural-language errands are translated into structured tasks, grounded
against a landmark dictionary, and executed by a five-state task machine
driving a simulated differential-drive robot with A* global planning and
velocity-obstacle collision avoidance.
"""

__version__ = "0.1.0"
