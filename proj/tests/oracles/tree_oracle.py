#!/usr/bin/env python3
"""Reference tree shapes from html5lib for malformed fixtures.

For each element the linter inspects, prints its ancestor tag path
(outermost first). Frozen into tests/test_html.cpp.
"""
import sys
import html5lib

WATCH = {"img", "a", "input", "button", "label", "h1", "h2", "h3", "h4", "h5", "h6", "li", "td", "p", "div"}


def walk(el, path, out):
    tag = el.tag.split("}")[-1]
    if tag in WATCH:
        out.append("%s < %s" % (tag, " > ".join(path)))
    for child in el:
        if isinstance(child.tag, str):
            walk(child, path + [tag], out)


for name in sys.argv[1:]:
    with open(name, "rb") as f:
        root = html5lib.parse(f, treebuilder="etree", namespaceHTMLElements=False)
    out = []
    walk(root, [], out)
    print("# " + name)
    for line in out:
        print('    "%s",' % line)
