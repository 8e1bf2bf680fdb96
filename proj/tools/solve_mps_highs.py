#!/usr/bin/env python3
"""Solve an MPS model with HiGHS and write a vaxsite solution file.

    python3 tools/solve_mps_highs.py model.mps plan.sol

Output lines are "name value" for every nonzero column, preceded by the
objective as a comment. Requires the highspy package.
"""

import argparse
import sys

import highspy


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("mps")
    parser.add_argument("solution")
    parser.add_argument("--time-limit", type=float, default=600.0)
    args = parser.parse_args()

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.setOptionValue("mip_abs_gap", 0.0)
    h.setOptionValue("time_limit", args.time_limit)
    if h.readModel(args.mps) != highspy.HighsStatus.kOk:
        print(f"cannot read {args.mps}", file=sys.stderr)
        return 3
    h.run()
    status = h.getModelStatus()
    if status == highspy.HighsModelStatus.kInfeasible:
        print("status=infeasible")
        return 2
    if status != highspy.HighsModelStatus.kOptimal:
        print(f"HiGHS stopped with {h.modelStatusToString(status)}", file=sys.stderr)
        return 4

    lp = h.getLp()
    values = h.getSolution().col_value
    with open(args.solution, "w") as out:
        out.write(f"# objective {h.getInfo().objective_function_value!r}\n")
        integer = list(lp.integrality_) or [highspy.HighsVarType.kContinuous] * len(values)
        for name, value, kind in zip(lp.col_names_, values, integer):
            if kind != highspy.HighsVarType.kContinuous:
                value = round(value)
            if value != 0:
                out.write(f"{name} {value!r}\n")
    print(f"objective {h.getInfo().objective_function_value!r}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
