"""Command-line front end: demos, identity checks, audits, and reports.

Five subcommands share one flag set: demo (one end-to-end session),
check-lemmas (exact combinatorial identity checks over a parameter grid),
audit (privacy, recoverability, and rate audits), census (answer-profile
table with golden diff for (4,5,2)), and simulate (seeded Monte Carlo).

Configuration resolves in three layers: built-in defaults, then a flat
"key = value" config file given with --config, then command-line flags.
Reports contain no timestamps or timing, so identical configuration and
seed reproduce byte-identical output (also written to --out when given).

Exit codes: 0 all checks passed, 1 a check failed, 2 configuration error,
3 budget refusal.
"""

from __future__ import annotations

import csv
import io
import sys
from dataclasses import dataclass
from typing import Callable, Optional

import click

from . import census_golden
from .auditor import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    answer_appearance_probability,
    answer_set_census,
    canonical_pair,
    check_privacy,
    check_rate,
    check_recoverability,
    default_audit_grid,
    monte_carlo_audit,
)
from .core import MessageStore, SchemeParams
from .distributions import (
    corrupted_m_coeff,
    lemma_grid,
    m_coeff,
    verify_alternating_identity,
    verify_pij_distribution,
    verify_poly_identity,
    verify_summij,
)
from .protocol import run_session
from .randomness import SamplerSource

_DEFAULT_PARAMS = "4,5,2,3,2"
_CONFIG_KEYS = ("params", "seed", "trials", "grid", "budget", "out", "format")


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved run configuration shared by every subcommand."""

    params: Optional[SchemeParams]
    seed: int
    trials: int
    grid: Optional[tuple]
    budget: int
    out: Optional[str]
    fmt: str

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer, got %d" % self.seed)
        if self.trials < 1:
            raise ValueError("trials must be >= 1, got %d" % self.trials)
        if self.budget < 1:
            raise ValueError("budget must be >= 1, got %d" % self.budget)
        if self.fmt not in ("text", "tabular"):
            raise ValueError("format must be text or tabular, got %r" % self.fmt)


def _parse_params(text: str) -> SchemeParams:
    parts = text.replace(" ", "").split(",")
    if len(parts) != 5:
        raise ValueError("params must be five integers N,K,M,L,q, got %r" % text)
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise ValueError("params must be five integers N,K,M,L,q, got %r" % text)
    return SchemeParams(*values)


def _read_grid_file(path: str) -> tuple:
    grid = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                try:
                    grid.append(_parse_params(line))
                except ValueError as exc:
                    raise ValueError("%s line %d: %s" % (path, lineno, exc))
    except OSError as exc:
        raise ValueError("cannot read grid file %s: %s" % (path, exc))
    if not grid:
        raise ValueError("grid file %s lists no parameter tuples" % path)
    return tuple(grid)


def _read_config_file(path: str) -> dict:
    values: dict = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError("%s line %d: expected key = value" % (path, lineno))
                key, _, val = line.partition("=")
                key, val = key.strip(), val.strip()
                if key not in _CONFIG_KEYS:
                    raise ValueError(
                        "%s line %d: unknown key %r (known: %s)"
                        % (path, lineno, key, ", ".join(_CONFIG_KEYS))
                    )
                values[key] = val
    except OSError as exc:
        raise ValueError("cannot read config file %s: %s" % (path, exc))
    return values


def _build_config(
    config_path: Optional[str],
    params_text: Optional[str],
    seed: Optional[int],
    trials: Optional[int],
    grid_path: Optional[str],
    budget: Optional[int],
    out_path: Optional[str],
    fmt: Optional[str],
) -> ExperimentConfig:
    """Layer config file values under command-line flags, over defaults."""
    file_vals = _read_config_file(config_path) if config_path else {}

    def pick(flag, key):
        return flag if flag is not None else file_vals.get(key)

    params_text = pick(params_text, "params")
    grid_path = pick(grid_path, "grid")
    out_path = pick(out_path, "out")
    fmt = pick(fmt, "format")

    def pick_int(flag, key):
        raw = pick(flag, key)
        if raw is None:
            return None
        try:
            return int(raw)
        except (TypeError, ValueError):
            raise ValueError("%s must be an integer, got %r" % (key, raw))

    seed = pick_int(seed, "seed")
    trials = pick_int(trials, "trials")
    budget = pick_int(budget, "budget")

    return ExperimentConfig(
        params=_parse_params(params_text) if params_text is not None else None,
        seed=seed if seed is not None else 0,
        trials=trials if trials is not None else 100_000,
        grid=_read_grid_file(grid_path) if grid_path is not None else None,
        budget=budget if budget is not None else DEFAULT_BUDGET,
        out=out_path,
        fmt=fmt if fmt is not None else "text",
    )


def _common_options(fn: Callable) -> Callable:
    opts = [
        click.option("--config", "config_path", default=None, metavar="FILE",
                     help="Flat key = value config file; command-line flags win."),
        click.option("--params", "params_text", default=None, metavar="N,K,M,L,q",
                     help="Parameter tuple."),
        click.option("--seed", type=int, default=None, help="PRNG seed (64-bit unsigned)."),
        click.option("--trials", type=int, default=None, help="Monte Carlo session count."),
        click.option("--grid", "grid_path", default=None, metavar="FILE",
                     help="File of parameter tuples, one N,K,M,L,q per line."),
        click.option("--budget", type=int, default=None,
                     help="Enumeration branch ceiling (default %d)." % DEFAULT_BUDGET),
        click.option("--out", "out_path", default=None, metavar="PATH",
                     help="Also write the report to this file."),
        click.option("--format", "fmt", type=click.Choice(["text", "tabular"]), default=None,
                     help="Report format: human-readable text or CSV."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _csv_table(header: tuple, rows: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().rstrip("\n")


def _emit(report: str, cfg: ExperimentConfig) -> None:
    click.echo(report)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(report + "\n")


def _finish(body: Callable, **kwargs) -> None:
    """Run a command body with the shared exit-code contract."""
    try:
        cfg = _build_config(**kwargs)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    try:
        code = body(cfg)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    except BudgetExceeded as exc:
        click.echo("budget refusal: %s" % exc, err=True)
        sys.exit(3)
    sys.exit(code)


def _params_str(p: SchemeParams) -> str:
    return "%d,%d,%d,%d,%d" % p.as_tuple()


def _vec_str(v: tuple) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


@click.group()
def main() -> None:
    """Exact audits and demos for the multi-server retrieval scheme."""


@main.command()
@_common_options
def demo(**kwargs) -> None:
    """Run one seeded end-to-end session and print the transcript."""

    def body(cfg: ExperimentConfig) -> int:
        params = cfg.params or _parse_params(_DEFAULT_PARAMS)
        ws = canonical_pair(params)
        store = MessageStore.random(params, cfg.seed)
        rng = SamplerSource(cfg.seed)
        result = run_session(ws, params, store, rng)
        matched = result.recovered == store[ws.W]
        downloaded = result.downloaded_symbols // params.subpacket_len

        if cfg.fmt == "tabular":
            rows = [
                ("params", _params_str(params)),
                ("seed", str(cfg.seed)),
                ("demand_index", str(ws.W)),
                ("side_information", " ".join(str(s) for s in ws.S)),
            ]
            for n, (q, a) in enumerate(zip(result.queries, result.answers), start=1):
                rows.append(("server_%d_query" % n, _vec_str(q)))
                rows.append(("server_%d_answer" % n, "-" if a.empty else _vec_str(a.payload)))
            rows.append(("decoded_demand", _vec_str(result.recovered.symbols)))
            rows.append(("downloaded_subpackets", str(downloaded)))
            rows.append(("decode_matches", "yes" if matched else "no"))
            report = _csv_table(("item", "value"), rows)
        else:
            lines = [
                "demo: N=%d K=%d M=%d L=%d q=%d seed=%d"
                % (params.N, params.K, params.M, params.L, params.q, cfg.seed),
                "demand index: %d  side information: {%s}"
                % (ws.W, ",".join(str(s) for s in ws.S)),
            ]
            for n, (q, a) in enumerate(zip(result.queries, result.answers), start=1):
                lines.append(
                    "server %d  query %s  answer %s"
                    % (n, _vec_str(q), "-" if a.empty else _vec_str(a.payload))
                )
            lines.append("decoded demand symbols: %s" % _vec_str(result.recovered.symbols))
            lines.append("downloaded sub-packets: %d" % downloaded)
            lines.append("decode matches stored demand message: %s" % ("yes" if matched else "no"))
            report = "\n".join(lines)
        _emit(report, cfg)
        return 0 if matched else 1

    _finish(body, **kwargs)


@main.command("check-lemmas")
@click.option("--corrupt-m-coeff", "corrupt_delta", type=int, default=0, hidden=True,
              help="Negative-control hook: offset added to one coefficient.")
@_common_options
def check_lemmas(corrupt_delta: int, **kwargs) -> None:
    """Verify the exact combinatorial identities over a parameter grid."""

    def body(cfg: ExperimentConfig) -> int:
        if cfg.grid is not None:
            grid = cfg.grid
        elif cfg.params is not None:
            grid = (cfg.params,)
        else:
            grid = lemma_grid()
        m_fn = corrupted_m_coeff(corrupt_delta) if corrupt_delta else m_coeff

        checks = []  # (check, where, passed, detail)
        for p in grid:
            r = verify_pij_distribution(p, m_fn)
            checks.append(("pair_distribution", "N=%d K=%d M=%d" % (p.N, p.K, p.M), r.passed, r.describe()))
            for j in range(1, p.K - p.M):
                r = verify_summij(p, j, m_fn)
                checks.append(("column_sum_identity", "N=%d K=%d M=%d j=%d" % (p.N, p.K, p.M, j), r.passed, r.describe()))
                r = verify_alternating_identity(j, p)
                checks.append(("alternating_identity", "N=%d K=%d M=%d j=%d" % (p.N, p.K, p.M, j), r.passed, r.describe()))
        for n in range(1, 13):
            for i in range(n):
                r = verify_poly_identity(n, [0] * i + [1])
                checks.append(("polynomial_identity", "n=%d monomial=k^%d" % (n, i), r.passed, r.describe()))

        failures = [c for c in checks if not c[2]]
        if cfg.fmt == "tabular":
            rows = [(name, where, "pass" if ok else "fail") for name, where, ok, _ in checks]
            report = _csv_table(("check", "where", "status"), rows)
        else:
            by_name: dict = {}
            for name, _, ok, _ in checks:
                good, bad = by_name.get(name, (0, 0))
                by_name[name] = (good + (1 if ok else 0), bad + (0 if ok else 1))
            lines = ["lemma checks over %d parameter tuples" % len(grid)]
            for name in ("pair_distribution", "column_sum_identity", "alternating_identity", "polynomial_identity"):
                good, bad = by_name.get(name, (0, 0))
                lines.append("%s: %d passed, %d failed" % (name, good, bad))
            for name, where, _, detail in failures[:20]:
                lines.append("failure %s at %s: %s" % (name, where, detail))
            lines.append("result: %s" % ("pass" if not failures else "FAIL"))
            report = "\n".join(lines)
        _emit(report, cfg)
        return 0 if not failures else 1

    _finish(body, **kwargs)


@main.command()
@_common_options
def audit(**kwargs) -> None:
    """Exact privacy, recoverability, and rate audits over parameter tuples."""

    def body(cfg: ExperimentConfig) -> int:
        if cfg.grid is not None:
            grid = cfg.grid
        elif cfg.params is not None:
            grid = (cfg.params,)
        else:
            grid = default_audit_grid()

        sections = []
        rows = []
        all_ok = True
        privacy_done: dict = {}
        for p in grid:
            nkm = (p.N, p.K, p.M)
            lines = ["=== N=%d K=%d M=%d L=%d q=%d ===" % (p.N, p.K, p.M, p.L, p.q)]
            if nkm in privacy_done:
                priv_ok = privacy_done[nkm]
                lines.append(
                    "privacy audit: shared with the first N=%d K=%d M=%d entry above"
                    " (the query distribution involves neither L nor q): %s"
                    % (nkm[0], nkm[1], nkm[2], "pass" if priv_ok else "FAIL")
                )
            else:
                priv = check_privacy(p, cfg.budget)
                priv_ok = privacy_done[nkm] = priv.passed
                lines.append(priv.describe())
            rate = check_rate(p, cfg.budget)
            lines.append(rate.describe())
            rec = check_recoverability(
                p, fills=1, seed=cfg.seed, mode="auto", exhaustive_cap=3_000_000
            )
            lines.append(rec.describe())
            ok = priv_ok and rate.passed and rec.passed
            all_ok = all_ok and ok
            sections.append("\n".join(lines))
            ps = _params_str(p)
            rows.append((ps, "privacy", "", "pass" if priv_ok else "fail"))
            rows.append((ps, "rate", str(rate.rate), "pass" if rate.passed else "fail"))
            rows.append((ps, "capacity", str(rate.capacity), ""))
            rows.append((ps, "recoverability_%s" % rec.mode,
                         "%d/%d" % (rec.successes, rec.sessions),
                         "pass" if rec.passed else "fail"))

        if cfg.fmt == "tabular":
            report = _csv_table(("params", "check", "value", "status"), rows)
        else:
            summary = "audit summary: %d tuples, %s" % (
                len(grid), "all checks passed" if all_ok else "CHECKS FAILED")
            report = "\n\n".join(sections + [summary])
        _emit(report, cfg)
        return 0 if all_ok else 1

    _finish(body, **kwargs)


@main.command()
@_common_options
def census(**kwargs) -> None:
    """Enumerate the answer-profile census; diff (4,5,2) against golden rows."""

    def body(cfg: ExperimentConfig) -> int:
        params = cfg.params or _parse_params(_DEFAULT_PARAMS)
        ws = canonical_pair(params)
        rep = answer_set_census(ws, params, cfg.budget)

        golden_lines: list = []
        ok = rep.passed
        if (params.N, params.K, params.M) == census_golden.GOLDEN_NKM:
            g_ok, diffs = census_golden.compare_census(rep)
            golden_lines.append(
                "golden fixture v%d comparison: %s"
                % (census_golden.FIXTURE_VERSION, "match" if g_ok else "MISMATCH")
            )
            golden_lines.extend("  " + d for d in diffs)
            k = params.K
            three = answer_appearance_probability((1,) * 3 + (0,) * (k - 3), ws, params, cfg.budget)
            four = answer_appearance_probability((1,) * 4 + (0,) * (k - 4), ws, params, cfg.budget)
            five = answer_appearance_probability((1,) * k, ws, params, cfg.budget)
            a_ok, a_lines = census_golden.compare_appearance(three, four, five)
            golden_lines.extend(a_lines)
            ok = ok and g_ok and a_ok
        else:
            golden_lines.append(
                "golden fixture comparison: not applicable (fixture covers N=%d K=%d M=%d)"
                % census_golden.GOLDEN_NKM
            )

        if cfg.fmt == "tabular":
            header, rows = rep.table_rows()
            report = _csv_table(header, list(rows))
        else:
            report = "\n".join([rep.describe()] + golden_lines + ["census result: %s" % ("pass" if ok else "FAIL")])
        _emit(report, cfg)
        return 0 if ok else 1

    _finish(body, **kwargs)


@main.command()
@_common_options
def simulate(**kwargs) -> None:
    """Seeded Monte Carlo sessions with exact cross-checks when affordable."""

    def body(cfg: ExperimentConfig) -> int:
        params = cfg.params or _parse_params(_DEFAULT_PARAMS)
        rep = monte_carlo_audit(
            params, trials=cfg.trials, seed=cfg.seed, budget=cfg.budget
        )
        if cfg.fmt == "tabular":
            rows = [
                ("params", _params_str(params)),
                ("trials", str(rep.trials)),
                ("seed", str(rep.seed)),
                ("decode_successes", str(rep.decode_successes)),
                ("mean_downloaded_symbols", "%.6f" % rep.mean_download_symbols),
                ("empirical_rate", "%.6f" % rep.empirical_rate),
                ("exact_rate", "" if rep.exact_rate is None else str(rep.exact_rate)),
                ("tv_distance", "" if rep.tv_distance is None else "%.6f" % rep.tv_distance),
                ("status", "pass" if rep.passed else "fail"),
            ]
            report = _csv_table(("metric", "value"), rows)
        else:
            report = rep.describe()
        _emit(report, cfg)
        return 0 if rep.passed else 1

    _finish(body, **kwargs)


if __name__ == "__main__":
    main()
