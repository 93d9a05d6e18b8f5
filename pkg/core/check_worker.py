from core.app_config import CheckConfig
from core.logger_config import logger
from typing import Any, Callable, Sequence
import asyncio

class CheckWorker:
    """
    Fans pure property cases out to worker threads and gathers the
    results back in case order, so reports do not depend on scheduling.
    """
    def __init__(self, workers: int = CheckConfig.WORKERS):
        if workers < 1:
            raise ValueError(f'workers must be at least 1, got {workers}')
        self.workers = workers

    async def _run_one(self, semaphore: asyncio.Semaphore, fn: Callable, index: int, case: Any):
        async with semaphore:
            return index, await asyncio.to_thread(fn, case)

    async def run_async(self, fn: Callable[[Any], Any], cases: Sequence[Any]) -> list:
        semaphore = asyncio.Semaphore(self.workers)
        tasks = [self._run_one(semaphore, fn, i, case) for i, case in enumerate(cases)]
        finished = await asyncio.gather(*tasks)
        # Merge by case index
        results = [None] * len(cases)
        for index, value in finished:
            results[index] = value
        logger.debug(f'{len(cases)} cases finished on {self.workers} workers')
        return results

    def run(self, fn: Callable[[Any], Any], cases: Sequence[Any]) -> list:
        if self.workers == 1:
            return [fn(case) for case in cases]
        return asyncio.run(self.run_async(fn, cases))
