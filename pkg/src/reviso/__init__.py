"""Reversible iso language: parser, checker, evaluator and Turing machine compiler."""
