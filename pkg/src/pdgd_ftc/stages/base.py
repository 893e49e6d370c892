"""Base class for all pipeline stages."""

import logging
from abc import ABC, abstractmethod

from ..common.logging import setup_cyclic_logger
from ..config import Config
from .context import RunContext


class AbstractStage(ABC):
    """Base class for pipeline stages with a shared logging convention."""

    def __init__(self, config: Config, stage_name: str):
        """Initialize stage.

        Args:
            config: System configuration
            stage_name: Short name of the stage (e.g., 'gains')
        """
        self.config = config
        self.stage_name = stage_name
        self.logger = self._setup_logger()

    def _setup_logger(self) -> logging.Logger:
        """Setup the cyclic logger ``stage.<name>``, once per process.

        Returns:
            Configured logger instance
        """
        name = f"stage.{self.stage_name}"
        existing = logging.getLogger(name)
        if existing.handlers:
            return existing
        log_file = self.config.log_dir / f"{self.stage_name}.log"
        return setup_cyclic_logger(
            name=name,
            log_file=log_file,
            max_lines=self.config.log_max_lines,
            level=self.config.log_level,
        )

    def __call__(self, ctx: RunContext) -> RunContext:
        self.log_start(ctx)
        try:
            count = self.run(ctx)
        except Exception as e:
            self.log_error(e, ctx.scenario.name)
            raise
        self.log_complete(ctx, count)
        return ctx

    @abstractmethod
    def run(self, ctx: RunContext) -> int:
        """Execute the stage on the shared context.

        Returns:
            Number of items produced (rows, checks, matrices)
        """

    def log_start(self, ctx: RunContext) -> None:
        """Log stage start."""
        self.logger.info(f"{self.stage_name.upper()} started ({ctx.scenario.name})")

    def log_complete(self, ctx: RunContext, processed_count: int = 0) -> None:
        """Log stage completion.

        Args:
            ctx: Run context
            processed_count: Number of items produced
        """
        self.logger.info(
            f"{self.stage_name.upper()} completed ({ctx.scenario.name}) - "
            f"Produced {processed_count} items"
        )

    def log_error(self, error: Exception, context: str = "") -> None:
        """Log error with context.

        Args:
            error: Exception that occurred
            context: Additional context information
        """
        msg = f"Error in {self.stage_name}"
        if context:
            msg += f" ({context})"
        msg += f": {str(error)}"
        self.logger.error(msg, exc_info=True)
