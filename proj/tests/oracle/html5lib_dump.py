#!/usr/bin/env python3
"""Freezes reference trees for the malformed-markup corpus.

Parses every #data case of malformed_corpus.txt with html5lib (scripting
disabled, no-quirks mode since clearlens always emits <!DOCTYPE html>) and
writes the tree in the indented format produced by
clearlens::html::debug_dump. Run once when the corpus changes:

    pip install html5lib
    python3 tests/oracle/html5lib_dump.py tests/oracle/malformed_corpus.txt \
        tests/data/html5_expected.txt
"""
import sys
import xml.dom

import html5lib


def read_cases(path):
    cases = []
    current = None
    with open(path, encoding="utf-8") as fh:
        for line in fh.read().split("\n"):
            if line == "#data":
                if current is not None:
                    cases.append("\n".join(current))
                current = []
            elif current is not None:
                current.append(line)
    if current is not None:
        cases.append("\n".join(current).rstrip("\n"))
    return cases


def dump(node, depth, out):
    indent = "  " * depth
    if node.nodeType == xml.dom.Node.DOCUMENT_NODE:
        for child in node.childNodes:
            dump(child, depth, out)
    elif node.nodeType == xml.dom.Node.DOCUMENT_TYPE_NODE:
        return
    elif node.nodeType == xml.dom.Node.COMMENT_NODE:
        out.append("%s<!-- %s -->" % (indent, node.data))
    elif node.nodeType == xml.dom.Node.TEXT_NODE:
        out.append('%s"%s"' % (indent, node.data))
    elif node.nodeType == xml.dom.Node.ELEMENT_NODE:
        out.append("%s<%s>" % (indent, node.tagName))
        attrs = sorted((a.name, a.value) for a in node.attributes.values())
        for name, value in attrs:
            out.append('%s  %s="%s"' % (indent, name, value))
        for child in node.childNodes:
            dump(child, depth + 1, out)


def main():
    source, target = sys.argv[1], sys.argv[2]
    parser = html5lib.HTMLParser(tree=html5lib.getTreeBuilder("dom"), namespaceHTMLElements=False)
    with open(target, "w", encoding="utf-8") as fh:
        for case in read_cases(source):
            document = parser.parse("<!DOCTYPE html>" + case, scripting=False)
            # The DOM builder does not merge adjacent character tokens.
            document.normalize()
            lines = []
            dump(document, 0, lines)
            fh.write("#data\n%s\n#document\n%s\n" % (case, "\n".join(lines)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
