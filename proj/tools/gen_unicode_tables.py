#!/usr/bin/env python3
"""Regenerate src/unicode_tables.inc from Python's unicodedata.

The tables drive textnorm: full case folding (str.casefold applied per
code point), punctuation detection (general category P*), and whitespace
detection (str.isspace). Run from the repository root:

    python3 tools/gen_unicode_tables.py > src/unicode_tables.inc
"""

import sys
import unicodedata

MAX_CP = 0x110000


def ranges(predicate):
    out = []
    start = None
    for cp in range(MAX_CP):
        if predicate(cp):
            if start is None:
                start = cp
        else:
            if start is not None:
                out.append((start, cp - 1))
                start = None
    if start is not None:
        out.append((start, MAX_CP - 1))
    return out


def is_punct(cp):
    return unicodedata.category(chr(cp)).startswith("P")


def is_space(cp):
    return chr(cp).isspace()


def casefold_entries():
    out = []
    for cp in range(MAX_CP):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        folded = chr(cp).casefold()
        if folded != chr(cp):
            cps = [ord(c) for c in folded]
            if len(cps) > 3:
                raise ValueError(f"fold of U+{cp:04X} expands to {len(cps)}")
            while len(cps) < 3:
                cps.append(0)
            out.append((cp, cps))
    return out


def main():
    w = sys.stdout.write
    w("// Generated by tools/gen_unicode_tables.py -- do not edit by hand.\n")
    w(f"// Unicode data version: {unicodedata.unidata_version}\n\n")

    folds = casefold_entries()
    w(f"static const CaseFoldEntry kCaseFolds[{len(folds)}] = {{\n")
    for cp, cps in folds:
        w(f"    {{0x{cp:X}, {{0x{cps[0]:X}, 0x{cps[1]:X}, 0x{cps[2]:X}}}}},\n")
    w("};\n\n")

    punct = ranges(is_punct)
    w(f"static const CpRange kPunctRanges[{len(punct)}] = {{\n")
    for a, b in punct:
        w(f"    {{0x{a:X}, 0x{b:X}}},\n")
    w("};\n\n")

    space = ranges(is_space)
    w(f"static const CpRange kSpaceRanges[{len(space)}] = {{\n")
    for a, b in space:
        w(f"    {{0x{a:X}, 0x{b:X}}},\n")
    w("};\n")


if __name__ == "__main__":
    main()
