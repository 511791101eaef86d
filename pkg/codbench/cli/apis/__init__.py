from __future__ import annotations

import argparse


def register_apis(subparsers: argparse._SubParsersAction[argparse.ArgumentParser]) -> None:
    from codbench.cli.apis import ablate
    from codbench.cli.apis import crossdata
    from codbench.cli.apis import evaluate
    from codbench.cli.apis import gencfg
    from codbench.cli.apis import infer
    from codbench.cli.apis import report
    from codbench.cli.apis import stats
    from codbench.cli.apis import train_toy

    infer.Args.register_subparser(subparsers, name="infer")
    train_toy.Args.register_subparser(subparsers, name="train-toy")
    evaluate.Args.register_subparser(subparsers, name="eval")
    stats.Args.register_subparser(subparsers, name="stats")
    ablate.Args.register_subparser(subparsers, name="ablate")
    crossdata.Args.register_subparser(subparsers, name="crossdata")
    report.Args.register_subparser(subparsers, name="report")
    gencfg.Args.register_subparser(subparsers, name="gencfg")
