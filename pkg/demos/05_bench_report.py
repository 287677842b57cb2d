#!/usr/bin/env python3
"""Run the shipped benchmark scenario and render its report.

The scenario compares all algorithm variants over one pair per regime
(P1..P4) on a 1000-node synthetic graph, three repetitions each.
Counters are bit-for-bit deterministic across runs; only the timing
columns move. The same scenario runs from the command line with:

    callpath bench --scenario data/scenarios/regimes.json --format markdown
"""

from pathlib import Path

from callpath import emit_report, load_scenario, run_scenario

scenario_path = Path(__file__).resolve().parent.parent / "data" / "scenarios" / "regimes.json"
scenario = load_scenario(scenario_path)
print(f"scenario: {len(scenario.pairs)} pairs x {len(scenario.algorithms)} algorithms, "
      f"{scenario.repetitions} repetitions, condition={scenario.condition.describe()}")

report = run_scenario(scenario)
print()
print(emit_report(report, "markdown"))

print("things to look for in the tables above:")
print("  - on the P4-like pair, postpone-3[paper] visits fewer nodes than balanced[paper]")
print("  - on the P3-like pair it visits more: the postponed handler gates the meeting point")
print("  - probe-only[paper] visits exactly what balanced[paper] visits")
print("  - the smaller-first frontier policy changes the balance between the two directions")
