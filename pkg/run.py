import argparse

from wasserlab.cli import run


if __name__ == "__main__":

    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", "-c", type=str, required=True)

    args, rest = parser.parse_known_args()

    raise SystemExit(run(rest + ["--config", args.config]))
