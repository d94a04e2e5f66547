#!/usr/bin/env python3
"""Answers 1 on every input, so never outputs 0 on an odd input."""
import sys

sys.stdin.readline()
print(1, flush=True)
