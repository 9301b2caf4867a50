"""Batch front end: enumerate, analyze, simulate, and sweep subcommands.

Configs are flat ``key = value`` text files (``#`` comments allowed) whose
keys mirror the session-config fields; unknown keys are rejected with the
offending line number.  Simulation output is a report (flat key-value), a
line-delimited per-block records file, and a manifest carrying the config
echo plus SHA-256 digests of the data files.  Identical config and seed
reproduce byte-identical data files.

Exit codes: 0 success (simulate: decision continue), 3 simulate decided
abort, 2 usage/config/I-O error, 1 internal fault.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__, analysis, code5
from .channel import EveStrategy, NoiseModel, UNIFORM_KNOWLEDGE, guessed_set_with_overlap
from .patterns import PatternSet, all_patterns, pattern_distance, valid_pattern_sets
from .protocol import (
    BlockRecord,
    DECISION_CONTINUE,
    SessionConfig,
    SessionReport,
    run_session,
    sample_secret_set,
    session_rng,
)

EXIT_OK = 0
EXIT_FAULT = 1
EXIT_USAGE = 2
EXIT_ABORT = 3

_DOMAIN_SWEEP = 2
_SESSION_EVE_GUESS = 2

RECORDS_HEADER = (
    "# block_id alice_bit a_idx b_idx lost syndrome bob_bit eve_guess eve_bit sifted tested"
)

CONFIG_KEYS = (
    "num_blocks",
    "master_seed",
    "secret_set",
    "test_fraction",
    "mqer_threshold",
    "logical_basis",
    "noise.per_qubit_flip_prob",
    "noise.distance_km",
    "noise.loss_db_per_km",
    "noise.mean_photon_number",
    "eve.kind",
    "eve.knowledge",
)

SWEEP_AXES = ("distance_km", "per_qubit_flip_prob", "mean_photon_number", "eve_overlap")


class ConfigError(Exception):
    """Malformed config; message carries line/field diagnostics."""


def parse_config_text(text: str) -> dict[str, str]:
    """Parse flat key = value lines; rejects unknown or duplicate keys."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        values[key] = value
    return values


def _parse_typed(values: dict[str, str], key: str, kind, default):
    if key not in values:
        return default
    try:
        return kind(values[key])
    except ValueError as exc:
        raise ConfigError(f"field {key!r}: {exc}") from exc


def build_session_config(
    values: dict[str, str],
    blocks: Optional[int] = None,
    seed: Optional[int] = None,
    threshold: Optional[float] = None,
    test_fraction: Optional[float] = None,
) -> SessionConfig:
    """Assemble a validated SessionConfig from parsed values plus overrides.

    A missing secret_set is drawn deterministically from the master seed.
    ``eve.knowledge`` accepts 'uniform', an explicit 'PPPPP QQQQQ' pair, or
    'overlap=K' for a seed-derived guess sharing exactly K patterns with
    the secret set.
    """
    num_blocks = blocks if blocks is not None else _parse_typed(values, "num_blocks", int, 1000)
    master_seed = seed if seed is not None else _parse_typed(values, "master_seed", int, 0)
    test_frac = (
        test_fraction if test_fraction is not None
        else _parse_typed(values, "test_fraction", float, 0.5)
    )
    mqer_threshold = (
        threshold if threshold is not None
        else _parse_typed(values, "mqer_threshold", float, 0.10)
    )
    basis = _parse_typed(values, "logical_basis", str, "Z")

    if "secret_set" in values:
        try:
            secret = PatternSet.from_string(values["secret_set"])
        except ValueError as exc:
            raise ConfigError(f"field 'secret_set': {exc}") from exc
    else:
        secret = sample_secret_set(master_seed)

    try:
        noise = NoiseModel(
            per_qubit_flip_prob=_parse_typed(values, "noise.per_qubit_flip_prob", float, 0.0),
            distance_km=_parse_typed(values, "noise.distance_km", float, 0.0),
            loss_db_per_km=_parse_typed(values, "noise.loss_db_per_km", float, 0.2),
            mean_photon_number=_parse_typed(values, "noise.mean_photon_number", float, 0.0),
        )
    except ValueError as exc:
        raise ConfigError(f"field 'noise': {exc}") from exc

    kind = _parse_typed(values, "eve.kind", str, "none")
    knowledge = values.get("eve.knowledge")
    try:
        if kind == "none":
            eve = EveStrategy.none()
        elif knowledge is None or knowledge == UNIFORM_KNOWLEDGE:
            eve = EveStrategy.intercept_resend(UNIFORM_KNOWLEDGE)
        elif knowledge.startswith("overlap="):
            count = int(knowledge.split("=", 1)[1])
            guess = guessed_set_with_overlap(
                secret, count, session_rng(master_seed, _SESSION_EVE_GUESS)
            )
            eve = EveStrategy.intercept_resend(guess)
        else:
            eve = EveStrategy.intercept_resend(PatternSet.from_string(knowledge))
    except ValueError as exc:
        raise ConfigError(f"field 'eve.knowledge': {exc}") from exc

    try:
        return SessionConfig(
            num_blocks=num_blocks,
            secret_set=secret,
            master_seed=master_seed,
            test_fraction=test_frac,
            mqer_threshold=mqer_threshold,
            noise=noise,
            eve=eve,
            logical_basis=basis,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def config_echo_items(config: SessionConfig) -> list[tuple[str, str]]:
    """The resolved configuration as flat key/value pairs."""
    if not config.eve.active:
        knowledge = "-"
    elif config.eve.knowledge == UNIFORM_KNOWLEDGE:
        knowledge = UNIFORM_KNOWLEDGE
    else:
        knowledge = str(config.eve.knowledge)
    return [
        ("num_blocks", str(config.num_blocks)),
        ("master_seed", str(config.master_seed)),
        ("secret_set", str(config.secret_set)),
        ("test_fraction", _fmt(config.test_fraction)),
        ("mqer_threshold", _fmt(config.mqer_threshold)),
        ("logical_basis", config.logical_basis),
        ("noise.per_qubit_flip_prob", _fmt(config.noise.per_qubit_flip_prob)),
        ("noise.distance_km", _fmt(config.noise.distance_km)),
        ("noise.loss_db_per_km", _fmt(config.noise.loss_db_per_km)),
        ("noise.mean_photon_number", _fmt(config.noise.mean_photon_number)),
        ("eve.kind", config.eve.kind),
        ("eve.knowledge", knowledge),
    ]


def _fmt(value: float) -> str:
    """Serialize a float; rejects non-finite values outright."""
    if isinstance(value, float) and not np.isfinite(value):
        raise ArithmeticError(f"refusing to serialize non-finite value {value!r}")
    return repr(float(value)) if isinstance(value, float) else str(value)


def format_records(records: Sequence[BlockRecord]) -> str:
    """Line-delimited block records in the documented column order."""
    lines = [RECORDS_HEADER]
    for r in records:
        lines.append(" ".join((
            str(r.block_id),
            str(r.alice_bit),
            str(r.alice_pattern_index),
            str(r.bob_pattern_index),
            "1" if r.lost else "0",
            code5.syndrome_bits(r.syndrome) if r.syndrome is not None else "-",
            str(r.bob_bit) if r.bob_bit is not None else "-",
            str(r.eve.guessed_pattern) if r.eve is not None else "-",
            str(r.eve.eve_bit) if r.eve is not None else "-",
            "1" if r.sifted else "0",
            "1" if r.disclosed_for_test else "0",
        )))
    return "\n".join(lines) + "\n"


def format_report(report: SessionReport) -> str:
    """Session report as a flat key-value document."""
    success = "-" if report.eve_success_rate is None else _fmt(report.eve_success_rate)
    items = [
        ("blocks_sent", str(report.blocks_sent)),
        ("blocks_lost", str(report.blocks_lost)),
        ("blocks_sifted", str(report.blocks_sifted)),
        ("blocks_tested", str(report.blocks_tested)),
        ("mqer_estimate", _fmt(report.mqer_estimate)),
        ("mqer_warning", "true" if report.mqer_warning else "false"),
        ("decision", report.decision),
        ("sift_rate", _fmt(report.sift_rate)),
        ("eve_success_rate", success),
        ("pns_leak_blocks", str(report.pns_leak_blocks)),
        ("raw_key_length", str(len(report.raw_key))),
        ("raw_key", "".join(str(b) for b in report.raw_key) or "-"),
    ]
    return "".join(f"{k} = {v}\n" for k, v in items)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(
    path: Path,
    config: SessionConfig,
    outputs: dict[str, Path],
    extra: Optional[list[tuple[str, str]]] = None,
) -> None:
    lines = [
        "tool_name = patternqkd",
        f"tool_version = {__version__}",
        f"created_utc = {time.strftime('%Y-%m-%dT%H:%M:%SZ', time.gmtime())}",
    ]
    lines += [f"config.{k} = {v}" for k, v in config_echo_items(config)]
    for name, out in outputs.items():
        lines.append(f"output.{name} = {out}")
    for name, out in outputs.items():
        lines.append(f"digest.{name} = sha256:{_sha256(out)}")
    for key, value in extra or []:
        lines.append(f"{key} = {value}")
    path.write_text("\n".join(lines) + "\n")


def _prepare_out_dir(path_str: str) -> Path:
    out = Path(path_str)
    out.mkdir(parents=True, exist_ok=True)
    probe = out / ".write-probe"
    probe.write_text("")
    probe.unlink()
    return out


def cmd_enumerate(args: argparse.Namespace) -> int:
    patterns = all_patterns()
    sets = valid_pattern_sets()
    written: list[Path] = []
    try:
        out = _prepare_out_dir(args.out)
        patterns_csv = out / "patterns.csv"
        written.append(patterns_csv)
        with patterns_csv.open("w") as fh:
            fh.write("pattern_id,mapping\n")
            for i, p in enumerate(patterns):
                fh.write(f"{i},{p}\n")
        if args.sets_csv:
            sets_csv = out / "sets.csv"
            written.append(sets_csv)
            with sets_csv.open("w") as fh:
                fh.write("set_id,perm_a,perm_b,distance\n")
                for i, s in enumerate(sets):
                    fh.write(f"{i},{s.first},{s.second},{pattern_distance(s.first, s.second)}\n")
    except OSError as exc:
        for path in written:
            path.unlink(missing_ok=True)
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"patterns={len(patterns)} sets={len(sets)}")
    return EXIT_OK


def _analyze_lines(mu_values: list[float], set_id: int) -> list[str]:
    sets = valid_pattern_sets()
    if not 0 <= set_id < len(sets):
        raise ConfigError(f"unknown set id {set_id} (valid: 0..{len(sets) - 1})")
    chosen = sets[set_id]

    dist = analysis.guess_outcome_distribution()
    report = analysis.holevo_bit_conditioned(chosen)
    overlap = abs(analysis.pattern_state_overlap(chosen))
    total = len(sets)
    lines = [
        f"patterns_total = {len(all_patterns())}",
        f"pattern_sets_total = {total}",
        f"guess_both_fraction = {int(dist.p_both * total)}/{total}",
        f"guess_one_fraction = {int(dist.p_one * total)}/{total}",
        f"guess_none_fraction = {int(dist.p_none * total)}/{total}",
        f"guess_both = {float(dist.p_both):.6e}",
        f"guess_one = {float(dist.p_one):.6f}",
        f"guess_none = {float(dist.p_none):.6f}",
    ]
    for label, k in (("none", 0), ("one", 1), ("both", 2)):
        success = analysis.eve_success_probability(k)
        lines.append(f"success_{label} = {success}")
        lines.append(f"entropy_success_{label} = {analysis.binary_entropy(success):.4f}")
        lines.append(
            f"mutual_info_{label} = {analysis.intercept_resend_mutual_info(success):.4f}"
        )
    lines += [
        f"set_id = {set_id}",
        f"set_patterns = {chosen}",
        f"pattern_state_overlap = {overlap:.6f}",
        f"chi_identical_ensembles_bits = {report.chi_identical_ensembles:.9f}",
        f"chi_bit_conditioned_bits = {report.chi_bit_conditioned:.9f}",
        f"entropy_average_bits = {report.entropy_average:.9f}",
        f"entropy_rho0_bits = {report.entropy_rho0:.9f}",
        f"entropy_rho1_bits = {report.entropy_rho1:.9f}",
    ]
    for mu in mu_values:
        lines.append(
            f"pns[mu={_fmt(mu)}] multiphoton = {analysis.multiphoton_prob(mu):.6e}"
            f" leak = {analysis.pns_block_leak_prob(mu):.6e}"
        )
    return lines


def cmd_analyze(args: argparse.Namespace) -> int:
    try:
        mu_values = [float(v) for v in args.mu.split(",")] if args.mu else [0.0, 0.1, 0.5]
    except ValueError as exc:
        print(f"error: bad --mu list: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if any(mu < 0 for mu in mu_values):
        print("error: --mu values must be >= 0", file=sys.stderr)
        return EXIT_USAGE
    try:
        lines = _analyze_lines(mu_values, args.set_id)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    try:
        if args.out:
            Path(args.out).write_text(text)
        if args.chi_csv:
            with Path(args.chi_csv).open("w") as fh:
                fh.write("set_id,chi_physical_bits,overlap_00,overlap_01\n")
                for set_id, chi, ov00, ov01 in analysis.chi_physical_sweep():
                    fh.write(f"{set_id},{chi:.9f},{ov00:.9f},{ov01:.9f}\n")
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def _load_config(args: argparse.Namespace) -> SessionConfig:
    path = Path(args.config)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    values = parse_config_text(text)
    return build_session_config(
        values,
        blocks=args.blocks,
        seed=args.seed,
        threshold=args.threshold,
        test_fraction=args.test_fraction,
    )


def _run_and_write(config: SessionConfig, out: Path) -> SessionReport:
    report, records = run_session(config)
    report_path = out / "report.txt"
    records_path = out / "records.txt"
    report_path.write_text(format_report(report))
    records_path.write_text(format_records(records))
    _write_manifest(
        out / "manifest.txt",
        config,
        {"report": report_path, "records": records_path},
    )
    return report


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        config = _load_config(args)
        out = _prepare_out_dir(args.out)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = _run_and_write(config, out)
    print(
        f"decision={report.decision} mqer={_fmt(report.mqer_estimate)} "
        f"sifted={report.blocks_sifted} tested={report.blocks_tested}"
    )
    return EXIT_OK if report.decision == DECISION_CONTINUE else EXIT_ABORT


def _sweep_config(base: SessionConfig, axis: str, value: float, sub_seed: int) -> SessionConfig:
    noise = base.noise
    eve = base.eve
    if axis == "distance_km":
        noise = NoiseModel(
            per_qubit_flip_prob=noise.per_qubit_flip_prob,
            distance_km=value,
            loss_db_per_km=noise.loss_db_per_km,
            mean_photon_number=noise.mean_photon_number,
        )
    elif axis == "per_qubit_flip_prob":
        noise = NoiseModel(
            per_qubit_flip_prob=value,
            distance_km=noise.distance_km,
            loss_db_per_km=noise.loss_db_per_km,
            mean_photon_number=noise.mean_photon_number,
        )
    elif axis == "mean_photon_number":
        noise = NoiseModel(
            per_qubit_flip_prob=noise.per_qubit_flip_prob,
            distance_km=noise.distance_km,
            loss_db_per_km=noise.loss_db_per_km,
            mean_photon_number=value,
        )
    elif axis == "eve_overlap":
        count = int(value)
        if count != value or count not in (0, 1, 2):
            raise ConfigError(f"eve_overlap values must be 0, 1, or 2, got {value}")
        guess = guessed_set_with_overlap(
            base.secret_set, count, session_rng(sub_seed, _SESSION_EVE_GUESS)
        )
        eve = EveStrategy.intercept_resend(guess)
    else:
        raise ConfigError(f"unknown sweep axis {axis!r}")
    return SessionConfig(
        num_blocks=base.num_blocks,
        secret_set=base.secret_set,
        master_seed=sub_seed,
        test_fraction=base.test_fraction,
        mqer_threshold=base.mqer_threshold,
        noise=noise,
        eve=eve,
        logical_basis=base.logical_basis,
    )


def _sub_seed(master_seed: int, index: int) -> int:
    seq = np.random.SeedSequence(master_seed, spawn_key=(_DOMAIN_SWEEP, index, 0))
    return int(seq.generate_state(1, np.uint64)[0])


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        base = _load_config(args)
        if not args.values:
            raise ConfigError("sweep needs a nonempty --values list")
        values = [float(v) for v in args.values.split(",")]
        if not all(np.isfinite(values)):
            raise ConfigError("sweep values must be finite")
        out = _prepare_out_dir(args.out)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    csv_path = out / "sweep.csv"
    rows: list[str] = ["axis_value,sift_rate,mqer,decision,eve_success"]
    fault: Optional[str] = None
    for index, value in enumerate(values):
        try:
            config = _sweep_config(base, args.axis, value, _sub_seed(base.master_seed, index))
            report, _ = run_session(config)
        except (ConfigError, Exception) as exc:  # noqa: BLE001 - flagged in manifest
            fault = f"run {index} (value {value}): {exc}"
            break
        success = "-" if report.eve_success_rate is None else _fmt(report.eve_success_rate)
        rows.append(
            f"{_fmt(value)},{_fmt(report.sift_rate)},{_fmt(report.mqer_estimate)},"
            f"{report.decision},{success}"
        )
    csv_path.write_text("\n".join(rows) + "\n")
    extra = [("sweep.axis", args.axis), ("sweep.partial", "true" if fault else "false")]
    if fault:
        extra.append(("sweep.fault", fault))
    _write_manifest(out / "manifest.txt", base, {"sweep": csv_path}, extra=extra)
    if fault:
        print(f"error: sweep aborted: {fault}", file=sys.stderr)
        return EXIT_FAULT
    print(f"sweep axis={args.axis} runs={len(values)} -> {csv_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="patternqkd",
        description="Pattern-based QKD over the five-qubit perfect code",
    )
    parser.add_argument("--version", action="version", version=f"patternqkd {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_enum = sub.add_parser("enumerate", help="dump pattern and pattern-set tables")
    p_enum.add_argument("--out", default="out", help="output directory")
    p_enum.add_argument("--sets-csv", action="store_true", help="also write the 6540-row set table")
    p_enum.set_defaults(func=cmd_enumerate)

    p_an = sub.add_parser("analyze", help="emit closed-form security quantities")
    p_an.add_argument("--mu", default=None, help="comma-separated mean photon numbers")
    p_an.add_argument("--set-id", type=int, default=0, help="pattern-set id for the chi report")
    p_an.add_argument("--out", default=None, help="also write the report to this file")
    p_an.add_argument("--chi-csv", default=None, help="write per-set chi table to this CSV")
    p_an.set_defaults(func=cmd_analyze)

    p_sim = sub.add_parser("simulate", help="run one session from a config file")
    p_sim.add_argument("--config", required=True, help="session config path")
    p_sim.add_argument("--out", default="out", help="output directory")
    p_sim.add_argument("--seed", type=int, default=None, help="override master_seed")
    p_sim.add_argument("--blocks", type=int, default=None, help="override num_blocks")
    p_sim.add_argument("--threshold", type=float, default=None, help="override mqer_threshold")
    p_sim.add_argument("--test-fraction", type=float, default=None, help="override test_fraction")
    p_sim.set_defaults(func=cmd_simulate)

    p_sw = sub.add_parser("sweep", help="run one session per axis value")
    p_sw.add_argument("--config", required=True, help="base session config path")
    p_sw.add_argument("--axis", required=True, choices=SWEEP_AXES, help="swept parameter")
    p_sw.add_argument("--values", required=True, help="comma-separated axis values")
    p_sw.add_argument("--out", default="out", help="output directory")
    p_sw.add_argument("--seed", type=int, default=None, help="override master_seed")
    p_sw.add_argument("--blocks", type=int, default=None, help="override num_blocks")
    p_sw.add_argument("--threshold", type=float, default=None, help="override mqer_threshold")
    p_sw.add_argument("--test-fraction", type=float, default=None, help="override test_fraction")
    p_sw.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - internal-fault exit contract
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_FAULT


if __name__ == "__main__":
    sys.exit(main())
