"""
Robot client for the networked mode.

Perception, inspection and the waypoint manager run here; the server only
sees footprint poses, detections and bookkeeping fields.
"""

import asyncio
import logging
from typing import Optional

from ..geometry import Pose2, VectorMap
from ..observability import trace_operation
from ..search_map import init_search_map, mark_visually_observed
from ..simulator import RobotRuntime, Scenario, build_navigation_grid
from ..utils import robot_stream
from .protocol import (
    Ack,
    Done,
    LockstepViolationError,
    Plan,
    Register,
    Update,
    expect,
    read_message,
    write_message,
)
from .server import parse_address

logger = logging.getLogger(__name__)


async def run_client(
    address: str,
    scenario: Scenario,
    robot: str,
    vector_map: Optional[VectorMap] = None,
) -> int:
    """
    Simulate one robot against a coordination server.

    Args:
        address: Server ``host:port``.
        scenario: The same scenario the server runs.
        robot: Name of the robot to simulate.
        vector_map: Preloaded map; read from the scenario when absent.

    Returns:
        Number of ticks simulated.

    Raises:
        ProtocolError: On any framing, ordering or transport failure.
    """
    index = scenario.robot_index(robot)
    spec = scenario.robots[index]
    vector_map = scenario.load_map() if vector_map is None else vector_map
    host, port = parse_address(address)

    with trace_operation("harness", "client_session", {"live.robot": robot}):
        reader, writer = await asyncio.open_connection(host, port)
        try:
            await write_message(writer, Register(robot=robot, spec=spec))
            plan = expect(await read_message(reader), Plan)
            global_path = [Pose2(*v) for v in plan.viewpoints] or [spec.start_pose]

            mirror = init_search_map(vector_map, scenario.planner.resolution)
            nav = build_navigation_grid(vector_map, scenario.objects, spec.radius)
            runtime = RobotRuntime(index, scenario, vector_map, global_path,
                                   robot_stream(scenario.seed, len(scenario.robots), index), nav)
            tick = 0
            while True:
                tick += 1
                update = runtime.step(tick, tick * scenario.tick_dt, mirror)
                await write_message(writer, Update.from_robot_update(robot, update))
                ack = expect(await read_message(reader), Ack)
                if ack.tick != tick:
                    raise LockstepViolationError(f"expected Ack{{{tick}}}, got Ack{{{ack.tick}}}")
                mark_visually_observed(mirror, ack.observed_cells)
                if ack.stop:
                    break
            await write_message(writer, Done(robot=robot))
            logger.info(f"Client {robot} finished after {tick} ticks")
            return tick
        finally:
            writer.close()
            try:
                await writer.wait_closed()
            except (ConnectionError, OSError):
                pass
