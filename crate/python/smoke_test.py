#!/usr/bin/env python3
"""End-to-end smoke test for the stable_invitations_py extension module.

Builds the cdylib with cargo, loads it from a temp directory, and checks the
bundled fixture instances plus a generate/solve round trip. Run from anywhere:

    python3 python/smoke_test.py
"""

import json
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "fixtures"


def build_module(workdir: Path) -> None:
    subprocess.run(
        ["cargo", "build", "-p", "stable-invitations-py"],
        cwd=REPO,
        check=True,
    )
    built = REPO / "target" / "debug" / "libstable_invitations_py.so"
    shutil.copy(built, workdir / "stable_invitations_py.so")


def fixture(name: str) -> str:
    return (FIXTURES / name).read_text()


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        workdir = Path(tmp)
        build_module(workdir)
        sys.path.insert(0, str(workdir))
        import stable_invitations_py as sip

        # One lonely-top agent among size-1 fans: two singleton optima.
        r = sip.solve(fixture("example1.json"))
        assert r["verdict"] == "stable" and r["size"] == 1, r
        stable_sets = sip.enumerate_stable(fixture("example1.json"))
        assert stable_sets == [[1], [2]], stable_sets

        # Opposed pair: nothing is stable, not even the empty invitation.
        r = sip.solve(fixture("example2.json"))
        assert r["verdict"] == "no_stable", r
        assert sip.enumerate_stable(fixture("example2.json")) == []

        # Size-decreasing outlier can lie its way from the full group to a solo
        # invite.
        r = sip.solve(fixture("example3.json"))
        assert r["size"] == 3, r
        m = sip.manipulate(fixture("example3.json"), mode="intervals")
        assert m is not None and m["agent"] == 1, m
        assert m["truthful_outcome"] == [1, 2, 3] and m["outcome"] == [1], m
        assert m["misreport"]["kind"] == "preference", m

        # Friend/rival pairs force two blocs of two.
        r = sip.solve(fixture("example4.json"))
        assert r["size"] == 2 and r["path"] == "exact-search", r
        c = sip.check(fixture("example4.json"), r["members"])
        assert c == {
            "individually_rational": True,
            "envy_free": True,
            "stable": True,
        }, c

        # A rejection cycle under full-invitation preferences kills every
        # invitation.
        r = sip.solve(fixture("example5.json"))
        assert r["verdict"] == "no_stable", r

        # Multi-slot documents report the chosen slot (1-based).
        r = sip.solve(fixture("multislot.json"))
        assert r["slot"] == 2 and r["members"] == [2], r

        # Threshold profile: mechanism invites everyone, and honesty wins.
        invited = sip.run_mechanism(fixture("inc_example.json"))
        assert invited == [1, 2, 3], invited
        assert sip.manipulate(fixture("inc_example.json"), mechanism="inc") is None

        # The small audited space: no table is both strategy-proof and
        # stable-finding.
        v = sip.verify_impossibility("lemma_gsip")
        assert v["tables"] == 256 and v["intersection"] == 0 and v["verified"], v

        # Seeded generation is deterministic and the output parses and solves.
        config = json.dumps(
            {"n": 7, "preference_family": "interval_single_peaked", "seed": 11}
        )
        doc = sip.generate(config)
        assert doc == sip.generate(config)
        r = sip.solve(doc)
        assert r["verdict"] in ("stable", "no_stable"), r

        # Capacity and usage errors surface as Python exceptions.
        try:
            sip.verify_impossibility("nonsense")
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError for unknown case")

    print("smoke test passed")


if __name__ == "__main__":
    main()
