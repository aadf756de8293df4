# Licensed under the MIT License.

import logging
import signal
import threading

logger = logging.getLogger(__name__)


class DeferredInterrupt:
    """Hold back SIGINT while a block of output files is being written.

    The interrupt is re-raised as ``KeyboardInterrupt`` once the block exits, so
    an imputation set on disk is either complete or absent from the manifest.
    """

    def __init__(self, label="writing outputs"):
        self.label = label
        self.signaled = False
        self.original_handler = None

    def __enter__(self):
        self.signaled = False
        # signal handlers can only be installed from the main thread
        if threading.current_thread() is threading.main_thread():
            self.original_handler = signal.signal(signal.SIGINT, self._defer)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if self.original_handler is not None:
            signal.signal(signal.SIGINT, self.original_handler)
            self.original_handler = None
            if self.signaled and exc_type is None:
                raise KeyboardInterrupt
        return False

    def _defer(self, signum, frame):
        self.signaled = True
        logger.warning("Interrupt received while %s; stopping once it finishes", self.label)
