#!/usr/bin/env python
# * coding: utf8 *
"""
Run the H(b) experiments from the command line. Each subcommand writes one CSV table, to --out or to stdout.
"""
import argparse
import logging
import sys
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

import numpy as np
import pandas as pd
from supervisor.message_handlers import ConsoleHandler
from supervisor.models import MessageDetails, Supervisor

#: This makes it work when calling with just `python <file>` as well as when installed via pip, where the relative
#: imports are the ones that resolve.
try:
    from . import bounds, config, hayman, helpers, pythagoras, series, space, summability, version
except ImportError:
    import bounds
    import config
    import hayman
    import helpers
    import pythagoras
    import series
    import space
    import summability
    import version


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings shared by every subcommand.

    Attributes:
        phi (series.PhiSpec): The symbol
        alpha (float): Cesaro order
        trunc (int): Series truncation T
        gram_size (int): Gram size N, at most T
        grid_size (int): Boundary samples K, a power of two with K >= 4T
        out (Path | None): CSV destination; stdout when None
        matrix (Path | None): Custom summability matrix replacing Cesaro(alpha)
        seed (int): Seed for random sample polynomials
        format (str): Output format; only csv is supported
    """

    phi: series.PhiSpec
    alpha: float = 0.0
    trunc: int = config.DEFAULT_TRUNCATION
    gram_size: int = config.DEFAULT_GRAM_SIZE
    grid_size: int = config.DEFAULT_GRID
    out: Path | None = None
    matrix: Path | None = None
    seed: int = config.DEFAULT_SEED
    format: str = "csv"

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError(f"--alpha must be non-negative, got {self.alpha}")
        if self.trunc < 0:
            raise ValueError(f"--trunc must be non-negative, got {self.trunc}")
        if not 0 <= self.gram_size <= self.trunc:
            raise ValueError(f"--gram {self.gram_size} must lie in 0..--trunc ({self.trunc})")
        if self.grid_size < 4 or self.grid_size & (self.grid_size - 1):
            raise ValueError(f"--grid must be a power of two, got {self.grid_size}")
        if self.grid_size < 4 * self.trunc:
            raise ValueError(f"--grid {self.grid_size} must be at least 4 * --trunc ({4 * self.trunc})")
        if self.format != "csv":
            raise ValueError(f"Unsupported output format {self.format!r}")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "ExperimentConfig":
        return cls(
            phi=series.parse_phi(args.phi),
            alpha=args.alpha,
            trunc=args.trunc,
            gram_size=args.gram,
            grid_size=args.grid,
            out=Path(args.out) if args.out else None,
            matrix=Path(args.matrix) if args.matrix else None,
            seed=args.seed,
        )

    def method(self) -> summability.TriMatrixSpec:
        if self.matrix is not None:
            return summability.load_custom_matrix(self.matrix)
        return summability.Cesaro(self.alpha)


class Lab:
    """Runs one experiment: sets up logging and the supervisor, computes the table, writes it and reports a summary."""

    def __init__(self, experiment: ExperimentConfig):
        self.experiment = experiment
        self.log_path = None
        if experiment.out is not None:
            self.log_path = experiment.out.with_name(experiment.out.name + config.LOG_FILE_SUFFIX)
        self.handlers = []
        self._initialize_supervisor()
        self.lab_logger = logging.getLogger(config.LAB_NAME)

    def _initialize_supervisor(self):
        """A helper method to set up logging and supervisor

        Logs go to stderr so that CSV on stdout stays clean, plus a file next to the output when there is one.
        """

        lab_logger = logging.getLogger(config.LAB_NAME)
        lab_logger.setLevel(config.LOG_LEVEL)

        formatter = logging.Formatter(
            fmt="%(levelname)-7s %(asctime)s %(name)15s:%(lineno)5s %(message)s", datefmt="%Y-%m-%d %H:%M:%S"
        )
        cli_handler = logging.StreamHandler(sys.stderr)
        cli_handler.setLevel(config.LOG_LEVEL)
        cli_handler.setFormatter(formatter)
        lab_logger.addHandler(cli_handler)
        self.handlers.append(cli_handler)

        if self.log_path is not None:
            log_handler = logging.FileHandler(self.log_path, mode="w")
            log_handler.setLevel(config.LOG_LEVEL)
            log_handler.setFormatter(formatter)
            lab_logger.addHandler(log_handler)
            self.handlers.append(log_handler)

        #: Log any warnings at logging.WARNING
        #: Put after everything else to prevent creating a duplicate, default formatter
        logging.captureWarnings(True)

        lab_logger.debug("Creating Supervisor object")
        self.supervisor = Supervisor(handle_errors=False)
        self.supervisor.add_message_handler(ConsoleHandler())

    def _remove_log_handlers(self):
        """Detach and close the handlers this run added, so repeated runs do not stack them."""

        lab_logger = logging.getLogger(config.LAB_NAME)
        for handler in self.handlers:
            lab_logger.removeHandler(handler)
            handler.close()
        self.handlers = []

    def _context(self) -> space.HbContext:
        return space.HbContext.from_phi(self.experiment.phi, self.experiment.trunc)

    def _pair(self) -> pythagoras.PythagoreanPair:
        return pythagoras.pair_from_phi(self.experiment.phi, self.experiment.grid_size, self.experiment.trunc)

    def run(self, command: str, table_builder, *args, **kwargs) -> int:
        """Build a table, write it and report the summary.

        Args:
            command (str): Subcommand name for the summary
            table_builder: Bound cmd_* method returning (table, detail lines)

        Returns:
            int: Number of rows written
        """

        start = datetime.now()
        self.lab_logger.info("Running %s for %s", command, self.experiment.phi.describe())
        try:
            table, details = table_builder(*args, **kwargs)
            rows_written = helpers.write_table(table, self.experiment.out)
            end = datetime.now()

            summary_rows = [
                f'{config.LAB_NAME} {command} {start.strftime("%Y-%m-%d")}',
                "=" * 20,
                "",
                f'Start time: {start.strftime("%H:%M:%S")}',
                f'End time: {end.strftime("%H:%M:%S")}',
                f"Duration: {str(end-start)}",
                "",
                f"phi: {self.experiment.phi.describe()}",
                f"Rows written: {rows_written}",
                *details,
            ]
            self._report(command, summary_rows)
        except (ValueError, OSError) as error:
            self.lab_logger.error("%s failed: %s", command, error)
            raise
        finally:
            self._remove_log_handlers()
        return rows_written

    def _report(self, command: str, summary_rows: list[str]):
        if self.experiment.out is None:
            for line in summary_rows:
                if line:
                    self.lab_logger.info(line)
            return

        summary_message = MessageDetails()
        summary_message.subject = f"{config.LAB_NAME} {command} Summary"
        summary_message.message = "\n".join(summary_rows)
        summary_message.attachments = self.log_path
        self.supervisor.notify(summary_message)

    def cmd_norms(self) -> tuple[pd.DataFrame, list[str]]:
        """||z^n|| for n = 0..T, with the logarithm alongside for symbols whose norms pass the double range."""

        ctx = self._context()
        log_norms = ctx.log_norms()
        norms = np.sqrt(ctx.cum)
        table = pd.DataFrame({"n": np.arange(log_norms.size), "norm": norms, "log_norm": log_norms})
        return table, [f"Largest norm: {norms[-1]:.6g}"]

    def cmd_opnorm(self, n_list: list[int], sweep: bool = False) -> tuple[pd.DataFrame, list[str]]:
        """The lemma bound against truncated operator norms, at N = --gram or, with sweep, at N in {n, 2n, 4n}."""

        ctx = self._context()
        pair = self._pair()
        method = self.experiment.method()
        if not sweep:
            table = bounds.opnorm_profile(ctx, method, n_list, self.experiment.gram_size, pair=pair)
        else:
            estimates = [
                bounds.truncated_opnorm(ctx, method.row(n), multiple * n, pair=pair)
                for n in n_list
                for multiple in (1, 2, 4)
            ]
            table = pd.DataFrame(
                {
                    "n": [estimate.n for estimate in estimates],
                    "lemma_bound": [estimate.lemma_bound for estimate in estimates],
                    "truncated_norm": [estimate.value for estimate in estimates],
                    "N": [estimate.N for estimate in estimates],
                    "converged": [estimate.converged for estimate in estimates],
                }
            )
        details = [f"Method: {method.describe()}", f"a(0): {pair.a0:.12g}"]
        below = table.query("truncated_norm < lemma_bound * (1 - 1e-4)")
        if not below.empty:
            details.append(f"Rows below the lemma bound: {below['n'].tolist()}")
        return table, details

    def cmd_classify(self) -> tuple[pd.DataFrame, list[str]]:
        """One verdict row for Cesaro order --alpha."""

        verdict = bounds.classify_log(self._context().log_norms(), self.experiment.alpha)
        row = {"phi": self.experiment.phi.describe(), "alpha": self.experiment.alpha, **verdict.as_row()}
        table = pd.DataFrame([row])
        return table, [f"Verdict: {verdict.label} ({verdict.fitted_model} fit, rms {verdict.residual:.3e})"]

    def cmd_hayman(self, beta: float, gamma: float, n_list: list[int]) -> tuple[pd.DataFrame, list[str]]:
        model = hayman.HaymanModel(beta, gamma)
        table = hayman.compare_exact(model, n_list)
        return table, [f"C: {model.C:.12g}", f"D: {model.D:.12g}"]

    def cmd_cesaro_demo(
        self, sample: Path | None = None, degree: int = 50, n_list: list[int] | None = None
    ) -> tuple[pd.DataFrame, list[str]]:
        """||S_n(p) - p|| for a sample polynomial p, read from a file or drawn from the seeded generator."""

        if sample is not None:
            coeffs = helpers.load_polynomial(sample)
        else:
            rng = np.random.default_rng(self.experiment.seed)
            coeffs = rng.uniform(-1, 1, degree + 1) + 1j * rng.uniform(-1, 1, degree + 1)
        polynomial = space.HbPolynomial(coeffs)
        if polynomial.degree > self.experiment.gram_size:
            raise ValueError(f"Sample degree {polynomial.degree} exceeds --gram {self.experiment.gram_size}")

        ctx = self._context()
        method = self.experiment.method()
        n_values = list(range(self.experiment.gram_size + 1)) if n_list is None else n_list
        distances = [
            space.hb_norm(ctx, summability.apply_row(method.row(n), polynomial) - polynomial) for n in n_values
        ]
        table = pd.DataFrame({"n": n_values, "distance": distances})
        details = [f"Method: {method.describe()}", f"Sample degree: {polynomial.degree}"]
        return table, details

    def cmd_pair(self) -> tuple[pd.DataFrame, list[str]]:
        """Coefficients of a and b."""

        pair = self._pair()
        table = pd.DataFrame({"k": np.arange(pair.a.trunc + 1), "a": pair.a.values(), "b": pair.b.values()})
        return table, [f"a(0): {pair.a0:.12g}", f"Boundary defect: {pair.boundary_defect:.3e}"]

    def cmd_hypotheses(
        self, n_max: int | None = None, export: Path | None = None
    ) -> tuple[pd.DataFrame, list[str]]:
        """Running sup and partial sums of the three conditions for Cesaro(--alpha) or --matrix. The rows used can be
        exported in the --matrix file format.
        """

        ctx = self._context()
        method = self.experiment.method()
        if n_max is None:
            n_max = ctx.trunc if self.experiment.matrix is None else min(ctx.trunc, method.n_max)
        table = bounds.hypothesis_sums(ctx, method, n_max)
        last = table.iloc[-1]
        details = [
            f"Method: {method.describe()}",
            f"sup |gamma_nn| ||z^n||: {last['running_sup']:.6g}",
            f"sum (ii): {last['sum_ii']:.6g}",
            f"sum (iii): {last['sum_iii']:.6g}",
        ]
        if export is not None:
            summability.write_custom_matrix(method, n_max, export)
            details.append(f"Rows 0..{n_max} exported to {export}")
        return table, details


def _int_list(text: str) -> list[int]:
    try:
        values = [int(token) for token in text.replace(",", " ").split()]
    except ValueError as error:
        raise argparse.ArgumentTypeError(f"Expected comma-separated integers, got {text!r}") from error
    if not values:
        raise argparse.ArgumentTypeError("Expected at least one integer")
    return values


def _parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument(
        "--phi",
        default="dirichlet",
        help="Symbol: zero, dirichlet[:zeta=Z], pole:M=,N=, exp:beta=,gamma=, rational:num=..;den=..",
    )
    shared.add_argument("--alpha", type=float, default=0.0, help="Cesaro order")
    shared.add_argument("--matrix", help="Custom lower-triangular matrix file, replaces Cesaro(--alpha)")
    shared.add_argument("--trunc", type=int, default=config.DEFAULT_TRUNCATION, help="Series truncation T")
    shared.add_argument("--gram", type=int, default=config.DEFAULT_GRAM_SIZE, help="Gram size N")
    shared.add_argument("--grid", type=int, default=config.DEFAULT_GRID, help="Boundary samples K")
    shared.add_argument("--out", help="CSV destination; stdout when omitted")
    shared.add_argument("--seed", type=int, default=config.DEFAULT_SEED, help="Seed for random sample polynomials")

    parser = argparse.ArgumentParser(prog=config.LAB_NAME, description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {version.__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("norms", parents=[shared], help="Monomial norms ||z^n||")

    opnorm = commands.add_parser("opnorm", parents=[shared], help="The lemma bound and truncated operator norms")
    opnorm.add_argument("--n", type=_int_list, default=[4, 16, 64], help="Row indices, comma-separated")
    opnorm.add_argument("--sweep", action="store_true", help="Truncate at N = n, 2n, 4n instead of --gram")

    commands.add_parser("classify", parents=[shared], help="Divergence verdict for Cesaro order --alpha")

    hayman_parser = commands.add_parser("hayman", parents=[shared], help="Exact coefficients against asymptotics")
    hayman_parser.add_argument("--beta", type=float, default=1.0)
    hayman_parser.add_argument("--gamma", type=float, default=0.5)
    hayman_parser.add_argument("--n", type=_int_list, default=[500, 2000, 5000], help="Coefficient indices")

    demo = commands.add_parser("cesaro-demo", parents=[shared], help="Distance ||S_n(p) - p|| for a sample polynomial")
    demo.add_argument("--sample", help="Polynomial file; a seeded random polynomial when omitted")
    demo.add_argument("--degree", type=int, default=50, help="Degree of the random polynomial")
    demo.add_argument("--n", type=_int_list, help="Row indices; 0..--gram when omitted")

    commands.add_parser("pair", parents=[shared], help="Coefficients of the Pythagorean pair (b, a)")

    hypotheses = commands.add_parser("hypotheses", parents=[shared], help="Partial sums of the divergence conditions")
    hypotheses.add_argument("--n-max", type=int, help="Last row; T (or the last matrix row) when omitted")
    hypotheses.add_argument("--export-matrix", help="Also write the rows used to this file, in the --matrix format")

    return parser


def _command(lab: Lab, args: argparse.Namespace):
    """The cmd_* method for the chosen subcommand and its keyword arguments."""

    if args.command == "opnorm":
        return lab.cmd_opnorm, {"n_list": args.n, "sweep": args.sweep}
    if args.command == "hayman":
        return lab.cmd_hayman, {"beta": args.beta, "gamma": args.gamma, "n_list": args.n}
    if args.command == "cesaro-demo":
        sample = Path(args.sample) if args.sample else None
        return lab.cmd_cesaro_demo, {"sample": sample, "degree": args.degree, "n_list": args.n}
    if args.command == "hypotheses":
        export = Path(args.export_matrix) if args.export_matrix else None
        return lab.cmd_hypotheses, {"n_max": args.n_max, "export": export}
    return getattr(lab, f"cmd_{args.command}"), {}


def main(argv: list[str] | None = None) -> int:
    """Console entry point. Returns the process exit status: 0 on success, 2 on invalid input or I/O failure."""

    args = _parser().parse_args(argv)
    try:
        lab = Lab(ExperimentConfig.from_args(args))
    except (ValueError, OSError) as error:
        logging.getLogger(config.LAB_NAME).error("%s", error)
        return 2

    builder, kwargs = _command(lab, args)
    try:
        lab.run(args.command, builder, **kwargs)
    except (ValueError, OSError):
        return 2
    return 0


#: Putting this here means you can call the file via `python main.py` and it will run.
if __name__ == "__main__":
    sys.exit(main())
