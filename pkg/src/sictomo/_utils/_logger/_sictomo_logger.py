#   Copyright 2019 AUI, Inc. Washington DC, USA
#
#   Licensed under the Apache License, Version 2.0 (the "License");
#   you may not use this file except in compliance with the License.
#   You may obtain a copy of the License at
#
#       http://www.apache.org/licenses/LICENSE-2.0
#
#   Unless required by applicable law or agreed to in writing, software
#   distributed under the License is distributed on an "AS IS" BASIS,
#   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#   See the License for the specific language governing permissions and
#   limitations under the License.
import sys
import logging
from datetime import datetime

sictomo_logger_name = 'sictomo'


class sictomo_formatter(logging.Formatter):
    """
    Level names are colored only when the handler writes to a terminal, so redirected standard error stays plain text
    """

    reset = "\x1b[0m"
    colors = {
        logging.DEBUG: "\x1b[32;20m",      # green
        logging.INFO: "\x1b[33;34m",       # blue
        logging.WARNING: "\x1b[33;33m",    # yellow
        logging.ERROR: "\x1b[32;31m",      # red
        logging.CRITICAL: "\x1b[31;1m",    # bold red
    }

    start_msg = "%(asctime)s - "
    middle_msg = "%(levelname)-8s"
    end_msg = " - %(name)s - (%(filename)s:%(lineno)d) - %(message)s"

    def __init__(self, use_color=True):
        super().__init__()
        self.use_color = use_color

    def format(self, record):
        if self.use_color and record.levelno in self.colors:
            log_fmt = self.start_msg + self.colors[record.levelno] + self.middle_msg + self.reset + self.end_msg
        else:
            log_fmt = self.start_msg + self.middle_msg + self.end_msg
        return logging.Formatter(log_fmt).format(record)


class _below_level_filter(logging.Filter):
    """
    Passes only records under a level
    """

    def __init__(self, level):
        super().__init__()
        self.level = level

    def filter(self, record):
        return record.levelno < self.level


def _stream_handler(stream, max_level=None):
    handler = logging.StreamHandler(stream)
    handler.setFormatter(sictomo_formatter(use_color=hasattr(stream, 'isatty') and stream.isatty()))
    if max_level is not None:
        handler.addFilter(_below_level_filter(logging.getLevelName(max_level)))
    return handler


def _get_sictomo_logger(name=sictomo_logger_name):
    '''
    Returns the package logger. If it was never set up with _setup_sictomo_logger it defaults to printing to standard
    error at INFO level; standard output is reserved for command results.
    '''
    logger_dict = logging.Logger.manager.loggerDict
    if name in logger_dict:
        logger = logging.getLogger(name)
    else:
        logger = logging.getLogger(name)
        logger.addHandler(_stream_handler(sys.stderr))
        logger.setLevel(logging.getLevelName('INFO'))

    return logger


def _setup_sictomo_logger(log_to_term=True, log_to_file=False, log_file='sictomo_', log_level='INFO',
                          term_max_level=None, name=sictomo_logger_name):
    """
    Replaces the handlers of the package logger, optionally adding a time stamped log file. Records at
    term_max_level and above are kept off the terminal, the command line reports errors itself.
    """
    logger = logging.getLogger(name)
    logger.setLevel(logging.getLevelName(log_level))

    logger.handlers.clear()

    if log_to_term:
        logger.addHandler(_stream_handler(sys.stderr, term_max_level))

    if log_to_file:
        log_file = log_file+datetime.today().strftime('%Y%m%d_%H%M%S')+'.log'
        handler = logging.FileHandler(log_file)
        handler.setFormatter(sictomo_formatter(use_color=False))
        logger.addHandler(handler)

    return logger
