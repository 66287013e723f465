"""Fault-injection hook for the selftest negative control.

Setting PADICRIGID_FAULT_INJECT=padic-mul corrupts scalar multiplication
so the selftest command demonstrably catches broken arithmetic.  Never
set in production use.
"""

import os

_MODE = os.environ.get("PADICRIGID_FAULT_INJECT", "")


def mul_hook(value):
    if _MODE == "padic-mul" and value != 0:
        return value + 1
    return value
