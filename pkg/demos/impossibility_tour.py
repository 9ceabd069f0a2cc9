"""Walk the built-in impossibility corpus and print each certificate.

Every entry is a small instance where a fairness notion provably cannot be
met (or, for the control entries, provably can). The oracle checks every
admissible allocation, so a negative answer is a proof by exhaustion.
"""

from groupfair import corpus, run_corpus_entry

results = [(e, run_corpus_entry(e)) for e in corpus()]

width = max(len(e.name) for e, _ in results)
for entry, res in results:
    cert = res.certificate
    if cert.found:
        verdict = f"found {[list(b) for b in cert.allocation.goods_lists()]}"
    else:
        verdict = f"none among {cert.examined} candidates"
    flag = "ok " if res.passed else "BAD"
    print(f"{flag} {entry.name:<{width}}  {verdict}")
    print(f"    {entry.summary}")

print()
bad = [r for _, r in results if not r.passed]
print(f"{len(results) - len(bad)}/{len(results)} corpus entries behave as documented")
if bad:
    raise SystemExit(1)
