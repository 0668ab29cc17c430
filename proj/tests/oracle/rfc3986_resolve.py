#!/usr/bin/env python3
"""Reference resolution oracle for clearlens::resolve.

A direct transcription of the generic URI resolution algorithm (strict
parser, merge, remove_dot_segments) that shares no code with the C++ side.
Writes tests/data/resolve_cases.tsv: the worked examples from the URI
standard followed by 200 seeded random (base, href) pairs.

Columns: base, href, expected. "ERROR" marks references the http(s)-only
resolver must reject (other schemes, no authority). An empty path under an
authority is written as "/", the http scheme-based normal form.

    python3 tests/oracle/rfc3986_resolve.py tests/data/resolve_cases.tsv
"""
import random
import re
import sys

URI_RE = re.compile(r"^(([^:/?#]+):)?(//([^/?#]*))?([^?#]*)(\?([^#]*))?(#(.*))?$")


def split(uri):
    m = URI_RE.match(uri)
    return {
        "scheme": m.group(2),
        "authority": m.group(4) if m.group(3) is not None else None,
        "path": m.group(5),
        "query": m.group(7) if m.group(6) is not None else None,
        "fragment": m.group(9) if m.group(8) is not None else None,
    }


def remove_dot_segments(path):
    inp = path
    out = []
    while inp:
        if inp.startswith("../"):
            inp = inp[3:]
        elif inp.startswith("./"):
            inp = inp[2:]
        elif inp.startswith("/./"):
            inp = "/" + inp[3:]
        elif inp == "/.":
            inp = "/"
        elif inp.startswith("/../"):
            inp = "/" + inp[4:]
            if out:
                out.pop()
        elif inp == "/..":
            inp = "/"
            if out:
                out.pop()
        elif inp in (".", ".."):
            inp = ""
        else:
            start = 1 if inp.startswith("/") else 0
            cut = inp.find("/", start)
            if cut == -1:
                cut = len(inp)
            out.append(inp[:cut])
            inp = inp[cut:]
    return "".join(out)


def merge(base, ref_path):
    if base["authority"] is not None and base["path"] == "":
        return "/" + ref_path
    slash = base["path"].rfind("/")
    return base["path"][: slash + 1] + ref_path


def resolve(base_uri, ref_uri):
    base = split(base_uri)
    r = split(ref_uri)
    t = {}
    if r["scheme"] is not None:
        t["scheme"] = r["scheme"]
        t["authority"] = r["authority"]
        t["path"] = remove_dot_segments(r["path"])
        t["query"] = r["query"]
    else:
        if r["authority"] is not None:
            t["authority"] = r["authority"]
            t["path"] = remove_dot_segments(r["path"])
            t["query"] = r["query"]
        else:
            if r["path"] == "":
                t["path"] = base["path"]
                t["query"] = r["query"] if r["query"] is not None else base["query"]
            else:
                if r["path"].startswith("/"):
                    t["path"] = remove_dot_segments(r["path"])
                else:
                    t["path"] = remove_dot_segments(merge(base, r["path"]))
                t["query"] = r["query"]
            t["authority"] = base["authority"]
        t["scheme"] = base["scheme"]
    t["fragment"] = r["fragment"]
    return t


def recompose(t):
    scheme = t["scheme"].lower()
    if scheme not in ("http", "https") or t["authority"] is None:
        return "ERROR"
    path = t["path"] or "/"
    out = scheme + "://" + t["authority"] + path
    if t["query"] is not None:
        out += "?" + t["query"]
    if t["fragment"] is not None:
        out += "#" + t["fragment"]
    return out


STANDARD_BASE = "http://a/b/c/d;p?q"
STANDARD = [
    ("g:h", "ERROR"), ("g", "http://a/b/c/g"), ("./g", "http://a/b/c/g"),
    ("g/", "http://a/b/c/g/"), ("/g", "http://a/g"), ("//g", "http://g/"),
    ("?y", "http://a/b/c/d;p?y"), ("g?y", "http://a/b/c/g?y"),
    ("#s", "http://a/b/c/d;p?q#s"), ("g#s", "http://a/b/c/g#s"),
    ("g?y#s", "http://a/b/c/g?y#s"), (";x", "http://a/b/c/;x"),
    ("g;x", "http://a/b/c/g;x"), ("g;x?y#s", "http://a/b/c/g;x?y#s"),
    ("", "http://a/b/c/d;p?q"), (".", "http://a/b/c/"), ("./", "http://a/b/c/"),
    ("..", "http://a/b/"), ("../", "http://a/b/"), ("../g", "http://a/b/g"),
    ("../..", "http://a/"), ("../../", "http://a/"), ("../../g", "http://a/g"),
    ("../../../g", "http://a/g"), ("../../../../g", "http://a/g"),
    ("/./g", "http://a/g"), ("/../g", "http://a/g"), ("g.", "http://a/b/c/g."),
    (".g", "http://a/b/c/.g"), ("g..", "http://a/b/c/g.."), ("..g", "http://a/b/c/..g"),
    ("./../g", "http://a/b/g"), ("./g/.", "http://a/b/c/g/"), ("g/./h", "http://a/b/c/g/h"),
    ("g/../h", "http://a/b/c/h"), ("g;x=1/./y", "http://a/b/c/g;x=1/y"),
    ("g;x=1/../y", "http://a/b/c/y"), ("g?y/./x", "http://a/b/c/g?y/./x"),
    ("g?y/../x", "http://a/b/c/g?y/../x"), ("g#s/./x", "http://a/b/c/g#s/./x"),
    ("g#s/../x", "http://a/b/c/g#s/../x"), ("http:g", "ERROR"),
]

HOSTS = ["a.example", "b.example", "host-1.test", "x.y.z.test"]
SEGMENTS = ["a", "b", "c", "..", ".", "x.html", "", "d;p", "e-f", "~u"]
QUERIES = ["q", "a=1", "a=1&b=2", "", "x=/y/../z"]


def random_path(rng, absolute):
    segs = [rng.choice(SEGMENTS) for _ in range(rng.randint(0 if not absolute else 1, 4))]
    path = "/".join(segs)
    return "/" + path if absolute else path


def random_base(rng):
    scheme = rng.choice(["http", "https"])
    authority = rng.choice(HOSTS) + rng.choice(["", ":8080"])
    base = scheme + "://" + authority + random_path(rng, True)
    if rng.random() < 0.4:
        base += "?" + rng.choice(QUERIES)
    return base


def random_href(rng):
    kind = rng.randrange(8)
    if kind == 0:
        href = random_path(rng, False) or "g"
    elif kind == 1:
        href = random_path(rng, True)
    elif kind == 2:
        href = "//" + rng.choice(HOSTS) + random_path(rng, True)
    elif kind == 3:
        href = rng.choice(["http", "https"]) + "://" + rng.choice(HOSTS) + random_path(rng, True)
    elif kind == 4:
        href = "?" + rng.choice(QUERIES)
    elif kind == 5:
        href = "#" + rng.choice(["top", "s", "a/b"])
    elif kind == 6:
        href = rng.choice(["", ".", "..", "./", "../", "../../.."])
    else:
        href = "../" * rng.randint(1, 3) + rng.choice(["g", "g/h", "x.html"])
    if kind not in (4, 5) and rng.random() < 0.3:
        href += "?" + rng.choice(QUERIES)
    if kind != 5 and rng.random() < 0.2:
        href += "#frag"
    return href


def main():
    out_path = sys.argv[1]
    rows = []
    for href, expected in STANDARD:
        got = recompose(resolve(STANDARD_BASE, href))
        if got != expected:
            raise SystemExit(f"oracle disagrees with the standard on {href!r}: {got} != {expected}")
        rows.append((STANDARD_BASE, href, expected))
    rng = random.Random(20091)
    for _ in range(200):
        base = random_base(rng)
        href = random_href(rng)
        rows.append((base, href, recompose(resolve(base, href))))
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write("\t".join(row) + "\n")


if __name__ == "__main__":
    main()
