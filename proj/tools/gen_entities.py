#!/usr/bin/env python3
"""Regenerates core/src/entities.inc from Python's HTML5 named character reference table."""
import html.entities
import sys


def c_escape(text: str) -> str:
    out = []
    for byte in text.encode("utf-8"):
        out.append("\\x%02x" % byte)
    return "".join(out)


def main() -> int:
    target = sys.argv[1] if len(sys.argv) > 1 else "core/src/entities.inc"
    entries = sorted(html.entities.html5.items())
    with open(target, "w", encoding="utf-8") as fh:
        fh.write("// Generated by tools/gen_entities.py. Do not edit.\n")
        fh.write("// {name, utf-8 replacement}; names ending without ';' are legacy forms.\n")
        for name, value in entries:
            fh.write('{"%s", "%s"},\n' % (name, c_escape(value)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
