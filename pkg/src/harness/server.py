"""
Central coordination server: plans, owns the search map, and barriers every tick.

Each robot connection gets a session handler that forwards decoded messages
to a per-robot queue; a single round loop consumes the queues, so the search
map has exactly one mutation point per tick.
"""

import asyncio
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from ..geometry import VectorMap
from ..observability import trace_operation
from ..planner import CoveragePlan
from ..simulator import FailureMode, Scenario, TrajectoryLogWriter, TrialCoordinator, TrialResult, plan_for
from .protocol import (
    Ack,
    Done,
    LockstepViolationError,
    Plan,
    ProtocolError,
    Register,
    Update,
    expect,
    read_message,
    write_message,
)

logger = logging.getLogger(__name__)


def parse_address(address: str, default_host: str = "127.0.0.1") -> Tuple[str, int]:
    """Split ``host:port`` (or a bare ``port``) into its parts."""
    host, sep, port = address.rpartition(":")
    if not sep:
        host, port = default_host, address
    try:
        number = int(port)
    except ValueError as e:
        raise ValueError(f"invalid port in address '{address}'") from e
    if not 0 <= number <= 65535:
        raise ValueError(f"port out of range in address '{address}'")
    return host or default_host, number


class CoordinationServer:
    """
    Runs one networked trial.

    Usage: ``await start(host, port)``, connect one client per robot, then
    ``await run()`` returns the TrialResult.
    """

    def __init__(
        self,
        scenario: Scenario,
        vector_map: Optional[VectorMap] = None,
        plan: Optional[CoveragePlan] = None,
        log_path: Optional[Union[str, Path]] = None,
    ):
        self.scenario = scenario
        self.vector_map = scenario.load_map() if vector_map is None else vector_map
        self.plan = plan
        self.log_path = log_path
        n = len(scenario.robots)
        self._queues: List[asyncio.Queue] = [asyncio.Queue() for _ in range(n)]
        self._writers: Dict[int, asyncio.StreamWriter] = {}
        self._registered = asyncio.Event()
        self._server: Optional[asyncio.AbstractServer] = None
        self._failure: Optional[ProtocolError] = None
        self._acked_tick = 0
        self._logger = logging.getLogger(f"{__name__}.CoordinationServer")

    @property
    def address(self) -> Tuple[str, int]:
        if self._server is None:
            raise RuntimeError("server not started")
        host, port = self._server.sockets[0].getsockname()[:2]
        return host, port

    async def start(self, host: str = "127.0.0.1", port: int = 0) -> Tuple[str, int]:
        self._server = await asyncio.start_server(self._handle_session, host, port)
        self._logger.info(f"Listening on {self.address[0]}:{self.address[1]} for {len(self._queues)} robots")
        return self.address

    async def _handle_session(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        index = None
        try:
            register = expect(await read_message(reader), Register)
            robot = self.scenario.robot_index(register.robot)
            if robot in self._writers:
                raise LockstepViolationError(f"robot {register.robot} registered twice")
            if register.spec != self.scenario.robots[robot]:
                raise LockstepViolationError(f"robot {register.robot} registered with a different spec")
            index = robot
            self._writers[index] = writer
            self._logger.info(f"Session opened for {register.robot}")
            if len(self._writers) == len(self._queues):
                self._registered.set()
            while True:
                message = await read_message(reader)
                if isinstance(message, Update) and message.tick > self._acked_tick + 1:
                    raise LockstepViolationError(
                        f"{message.robot} sent tick {message.tick} ahead of Ack{{{self._acked_tick + 1}}}"
                    )
                await self._queues[index].put(message)
        except (ProtocolError, KeyError) as e:
            if index is None:
                self._logger.error(f"Rejected connection: {e}")
                self._fail(e if isinstance(e, ProtocolError) else LockstepViolationError(str(e)))
                writer.close()
                return
            await self._queues[index].put(e)

    def _fail(self, error: ProtocolError) -> None:
        if self._failure is None:
            self._failure = error
        self._registered.set()

    async def _next(self, index: int):
        item = await self._queues[index].get()
        if isinstance(item, Exception):
            raise item
        return item

    async def _broadcast(self, message) -> None:
        for index in sorted(self._writers):
            await write_message(self._writers[index], message)

    async def run(self) -> TrialResult:
        """Plan, hand out routes, and run lockstep rounds until the trial stops."""
        attributes = {"live.scenario": self.scenario.name, "live.mode": self.scenario.mode.value}
        with trace_operation("harness", "serve", attributes):
            plan = self.plan or plan_for(self.scenario, self.vector_map)
            with TrajectoryLogWriter(self.log_path) as log:
                coordinator = TrialCoordinator(self.scenario, self.vector_map, plan, log)
                try:
                    await self._registered.wait()
                    if self._failure is not None:
                        raise self._failure
                    for index, spec in enumerate(self.scenario.robots):
                        viewpoints = [p.as_tuple() for p in plan.viewpoints[index]]
                        await write_message(self._writers[index], Plan(robot=spec.name, viewpoints=viewpoints))
                    await self._rounds(coordinator)
                    result = coordinator.result()
                except ProtocolError as e:
                    self._logger.error(f"Trial {self.scenario.name} aborted: {type(e).__name__}: {e}")
                    result = coordinator.result(FailureMode.TRANSPORT, f"{type(e).__name__}: {e}")
                finally:
                    await self.close()
        self._logger.info(f"Trial {self.scenario.name} finished: {result.failure_mode.value}")
        return result

    async def _rounds(self, coordinator: TrialCoordinator) -> None:
        names = [r.name for r in self.scenario.robots]
        tick = 0
        while True:
            tick += 1
            messages = await asyncio.gather(*(self._next(i) for i in range(len(names))))
            updates = []
            for index, message in enumerate(messages):
                update = expect(message, Update)
                if update.robot != names[index]:
                    raise LockstepViolationError(f"{names[index]} sent an update for {update.robot}")
                if update.tick != tick:
                    raise LockstepViolationError(f"{update.robot} sent tick {update.tick} while tick {tick} is open")
                updates.append(update.to_robot_update(index))
            outcome = coordinator.apply_round(tick, updates)
            self._acked_tick = tick
            await self._broadcast(Ack(tick=tick, stop=outcome.stop, observed_cells=list(outcome.observed_cells)))
            if outcome.stop:
                break
        for index in range(len(names)):
            expect(await self._next(index), Done)

    async def close(self) -> None:
        for writer in self._writers.values():
            writer.close()
        for writer in self._writers.values():
            try:
                await writer.wait_closed()
            except (ConnectionError, OSError):
                pass
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()


async def serve(
    scenario: Scenario,
    listen_address: str,
    vector_map: Optional[VectorMap] = None,
    log_path: Optional[Union[str, Path]] = None,
) -> TrialResult:
    """Listen on ``host:port`` and run one trial with remotely simulated robots."""
    host, port = parse_address(listen_address)
    server = CoordinationServer(scenario, vector_map, log_path=log_path)
    await server.start(host, port)
    return await server.run()


async def serve_with_local_clients(
    scenario: Scenario,
    vector_map: Optional[VectorMap] = None,
    plan: Optional[CoveragePlan] = None,
    log_path: Optional[Union[str, Path]] = None,
    host: str = "127.0.0.1",
) -> TrialResult:
    """Run the server and one client per robot on an ephemeral loopback port."""
    from .client import run_client

    server = CoordinationServer(scenario, vector_map, plan, log_path)
    _, port = await server.start(host, 0)
    trial = asyncio.ensure_future(server.run())
    clients = [
        asyncio.ensure_future(run_client(f"{host}:{port}", scenario, robot.name, server.vector_map))
        for robot in scenario.robots
    ]
    result = await trial
    outcomes = await asyncio.gather(*clients, return_exceptions=True)
    for robot, outcome in zip(scenario.robots, outcomes):
        if isinstance(outcome, Exception):
            logger.error(f"Client {robot.name} ended with {type(outcome).__name__}: {outcome}")
    return result

