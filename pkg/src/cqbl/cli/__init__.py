"""Command-line surface: channel specs, argument parsing and commands."""

from .channel_spec import ChannelSpec, load_spec, save_spec
from .commands import COMMANDS, CommandContext, dispatch
from .parser import build_parser

__all__ = ["ChannelSpec", "COMMANDS", "CommandContext", "build_parser", "dispatch", "load_spec", "save_spec"]
