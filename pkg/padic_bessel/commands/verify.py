from __future__ import annotations

from typing import Any

from padic_bessel.config import RunConfig
from padic_bessel.registry import RegistryData
from padic_bessel.runtime import json_line, open_output, say
from padic_bessel.suites import run_suite, summarize


def selected_suites(registry: RegistryData, suite: str) -> tuple[str, ...]:
    if suite == "all":
        return registry.suite_ids
    return (suite,)


def run(args: Any) -> int:
    config: RunConfig = args.config
    registry: RegistryData = args.registry
    failures = 0
    with open_output(config.out) as stream:
        for suite_id in selected_suites(registry, args.suite):
            cases = run_suite(suite_id, config)
            for case in cases:
                stream.write(json_line(case.record()) + "\n")
            summary = summarize(cases)
            status = "pass" if summary["failed"] == 0 else "FAIL"
            say(f"{suite_id}: {status} ({summary['cases']} cases, {summary['failed']} failed, worst margin {summary['worst_margin']})")
            if summary["failed"]:
                failures += 1
                for case in cases:
                    if not case.passed:
                        say(f"  failed: {case.case} (margin {case.margin})")
    return 1 if failures else 0
