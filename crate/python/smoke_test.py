"""Smoke test for the `secrec` extension module.

Build and install first:

    pip install maturin
    pip install --no-build-isolation -e crates/python
    python python/smoke_test.py
"""

import json
import pathlib
import sys

import secrec

ROOT = pathlib.Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus" / "synthetic"

TRACE = """Exception in thread "main" java.io.EOFException
\tat java.io.ObjectInputStream$BlockDataInputStream.readInt(ObjectInputStream.java:2793)
\tat java.io.ObjectInputStream.readInt(ObjectInputStream.java:972)"""

PAGE = """<html><body>
<div class="nav"><a href="/">Home</a> <a href="/jobs">Jobs</a> <a href="/tags">Tags</a></div>
<div class="answer"><div class="post">
  <p>The EOFException comes from readInt on an ObjectInputStream that reached the end of the file.
  readInt throws instead of returning -1, so catch EOFException around the loop.</p>
  <pre><code>try { while (true) { list.add(in.readInt()); } } catch (EOFException e) { in.close(); }</code></pre>
</div></div>
<div class="other"><p>Have you tried a database instead? Flat files are hard to get right.</p></div>
<div class="footer"><a href="/about">About</a> <a href="/legal">Legal</a></div>
</body></html>"""


def check(cond, what):
    if not cond:
        print(f"FAIL {what}")
        sys.exit(1)
    print(f"ok   {what}")


def main():
    ctx = secrec.build_context(TRACE, "while (true) { list.add(in.readInt()); }")
    check("readint" in ctx.tokens and "javaioeofexception" in ctx.tokens, "context tokens")

    doc = secrec.Document(PAGE)
    check(len(doc) > 5 and doc.tag(doc.body_id) == "body", "parse str")
    check(len(secrec.Document(PAGE.encode("utf-8"))) == len(doc), "parse bytes")

    result = secrec.extract(doc, ctx)
    best = result.recommended()
    check(best is not None and "readInt" in best.text, "combined recommends the answer")
    check(json.loads(best.to_json())["node_id"] == best.node_id, "section JSON")
    check(result.ranked()[0].node_id == result.recommended_id, "ranked order")

    density = secrec.extract(doc, mode="density")
    check(density.mode == "density", "density mode without context")

    w = secrec.MetricWeights(beta=0.5)
    check(w.beta == 0.5 and w.alpha == 1.0, "weights defaults")
    try:
        secrec.extract(doc, ctx, mode="bogus")
        check(False, "bad mode rejected")
    except ValueError:
        check(True, "bad mode rejected")
    try:
        secrec.build_context("")
        check(False, "empty trace rejected")
    except ValueError:
        check(True, "empty trace rejected")

    p, r, f1 = secrec.score_case("a b c d", "a b x")
    check(abs(p - 0.5) < 1e-12 and abs(r - 2 / 3) < 1e-12 and abs(f1 - 4 / 7) < 1e-12, "score_case")
    check(secrec.lcs_length(["a", "b", "c"], ["a", "c"]) == 2, "lcs_length")
    tokens = secrec.tokenize("ObjectInputStream.readInt")
    check(tokens == ["objectinputstreamreadint", "object", "input", "stream", "read", "int"], "tokenize")
    try:
        secrec.Document(b"")
        check(False, "empty page rejected")
    except ValueError:
        check(True, "empty page rejected")

    if CORPUS.is_dir():
        report = secrec.run_corpus(str(CORPUS), workers=1)
        means = {m["mode"]: m["mf"] for m in report["means"]}
        check(set(means) == {"density", "relevance", "combined"}, "run_corpus modes")
        check(means["combined"] > max(means["density"], means["relevance"]), "combined wins on corpus")
        print("  MF " + "  ".join(f"{k}={v:.3f}" for k, v in sorted(means.items())))

    print("smoke test passed")


if __name__ == "__main__":
    main()
