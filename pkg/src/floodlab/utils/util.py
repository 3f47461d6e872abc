import os
import sys
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, List

import click
from loguru import logger

from floodlab.utils.constants import LOG_DIR
from floodlab.utils.exceptions import FloodlabError, StageError

# exit code for a failed stage; click usage errors exit 1
STAGE_FAILURE_EXIT = 2

# handlers added by begin_floodlab, removed again by end_floodlab
_handler_ids: List[int] = []


class OrderedCommands(click.Group):
    """This class will preserve the order of subcommands, which is useful when printing --help"""

    def list_commands(self, ctx: click.Context):
        return list(self.commands)


def floodlab_base(rel_path):
    return os.path.join(os.path.dirname(os.path.realpath(__file__)), rel_path)


def get_version():
    with open(floodlab_base("VERSION"), "r") as f:
        version = f.readline().strip()
    return version


log_fmt = (
    "[<green>{time:YYYY-MM-DD HH:mm:ss}</green>] <level>{level: <8}</level> | "
    "<level>{message}</level>"
)


def exit_on_error(_message) -> None:
    sys.exit(STAGE_FAILURE_EXIT)


def add_error_exit_sink() -> int:
    """
    Make any ERROR level log message terminate the process with the stage failure code.

    Returns:
        int: The loguru handler id.
    """
    handler_id = logger.add(exit_on_error, level="ERROR")
    _handler_ids.append(handler_id)
    return handler_id


"""
begin and end functions
"""


def begin_floodlab(params: Dict[str, Any], subcommand: str) -> float:
    """
    Begin a floodlab subcommand.

    Parameters:
        params (Dict[str, Any]): A dictionary of parameters for the subcommand.
        subcommand (str): Subcommand name.

    Returns:
        float: Start time of the process.
    """
    # get start time
    start_time = time.time()
    # logs live in their own folder so that the artifacts stay byte identical between reruns
    log_dir = Path(params["--out"]) / LOG_DIR
    log_dir.mkdir(parents=True, exist_ok=True)
    log_file = log_dir / f"floodlab_{subcommand}_{start_time}.log"
    _handler_ids.append(logger.add(log_file, format=log_fmt))
    add_error_exit_sink()

    print_splash()
    logger.info("floodlab: 5G/IoT DDoS simulation and detection lab")

    logger.info(f"You are using floodlab version {get_version()}")
    logger.info(f"You are running floodlab {subcommand}")
    logger.info("Listing parameters")
    for key, value in params.items():
        logger.info(f"Parameter: {key} {value}")

    return start_time


def end_floodlab(start_time: float, subcommand: str) -> None:
    """
    Finish a floodlab subcommand and log elapsed time.

    Parameters:
        start_time (float): Start time of the process.
        subcommand (str): Subcommand name.

    Returns:
        None
    """

    # Determine elapsed time
    elapsed_time = time.time() - start_time
    elapsed_time = round(elapsed_time, 2)

    # Show elapsed time for the process
    logger.info(f"floodlab {subcommand} has finished")
    logger.info("Elapsed time: " + str(elapsed_time) + " seconds")
    remove_handlers()


def remove_handlers() -> None:
    while _handler_ids:
        handler_id = _handler_ids.pop()
        try:
            logger.remove(handler_id)
        except ValueError:
            pass


@contextmanager
def stage(name: str) -> Iterator[None]:
    """
    Tag failures inside the block with the stage name.

    floodlab errors and I/O errors are re-raised as StageError.
    """
    try:
        yield
    except StageError:
        raise
    except (FloodlabError, OSError) as e:
        raise StageError(name, e) from e


@contextmanager
def guarded(subcommand: str) -> Iterator[None]:
    """
    Log a failed stage and exit with the stage failure code.

    Used around the body of every CLI subcommand.
    """
    try:
        with stage(subcommand):
            yield
    except StageError as e:
        try:
            # the error sink exits the process
            logger.error(str(e))
        finally:
            remove_handlers()
        sys.exit(STAGE_FAILURE_EXIT)


def print_splash():
    click.echo(
        """\b

  __ _                 _ _       _
 / _| | ___   ___   __| | | __ _| |__
| |_| |/ _ \\ / _ \\ / _` | |/ _` | '_ \\
|  _| | (_) | (_) | (_| | | (_| | |_) |
|_| |_|\\___/ \\___/ \\__,_|_|\\__,_|_.__/

""",
        err=True,
    )
