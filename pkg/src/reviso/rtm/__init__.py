"""Reversible Turing machines and their compilation to isos."""

from .compile import (
    compile_rtm,
    compile_rtm_flagged,
    computable_function,
    config_type,
    decode_config,
    encode_config,
    encode_word,
    pipeline,
    program_text,
    run_with_garbage,
)
from .machine import (
    Configuration,
    RTMachine,
    RTMError,
    Rule,
    RunError,
    parse_rtm,
    rtm_inverse,
    rtm_run,
    rtm_step,
    start_config,
)

__all__ = [
    "Configuration",
    "RTMError",
    "RTMachine",
    "Rule",
    "RunError",
    "compile_rtm",
    "compile_rtm_flagged",
    "computable_function",
    "config_type",
    "decode_config",
    "encode_config",
    "encode_word",
    "parse_rtm",
    "pipeline",
    "program_text",
    "rtm_inverse",
    "rtm_run",
    "rtm_step",
    "run_with_garbage",
    "start_config",
]
