"""Report containers shared by the gauges, the harnesses, and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field

from ._version import __version__


@dataclass(frozen=True)
class ConvergenceRow:
    """One step of a convergence experiment.

    ``n`` is the ladder step, ``sup_err`` the max pointwise error (the
    almost-everywhere gauge on a finite market), ``norm_errs`` one entry per
    requested norm, and ``pairing_errs`` one entry per bank density.  The
    absolute-pairing column pairs |difference| against each density, which
    cannot cancel across states.
    """

    n: int
    sup_err: float
    norm_errs: dict[str, float]
    pairing_errs: tuple[float, ...]
    abs_pairing_errs: tuple[float, ...] | None = None

    @property
    def pairing_max_err(self) -> float:
        return max(self.pairing_errs) if self.pairing_errs else 0.0

    @property
    def abs_pairing_max_err(self) -> float | None:
        if self.abs_pairing_errs is None:
            return None
        return max(self.abs_pairing_errs) if self.abs_pairing_errs else 0.0


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple[ConvergenceRow, ...]
    converged: dict[str, bool]
    norm_names: tuple[str, ...]
    meta: dict = field(default_factory=dict)

    def flags_string(self) -> str:
        return ";".join(f"{k}={int(v)}" for k, v in self.converged.items())

    def to_csv(self) -> str:
        """Render the report as CSV with full round-trip float precision."""
        include_abs = bool(self.rows) and self.rows[0].abs_pairing_errs is not None
        cols = ["n", "sup_err"]
        cols += [f"{name}_err" for name in self.norm_names]
        cols.append("pairing_max_err")
        if include_abs:
            cols.append("abs_pairing_max_err")
        cols.append("converged_flags")
        lines = []
        if self.meta:
            meta = " ".join(f"{k}={v}" for k, v in sorted(self.meta.items()))
            lines.append(f"# optionspan {__version__} {meta}")
        lines.append(",".join(cols))
        flags = self.flags_string()
        for row in self.rows:
            vals = [str(row.n), repr(row.sup_err)]
            vals += [repr(row.norm_errs[name]) for name in self.norm_names]
            vals.append(repr(row.pairing_max_err))
            if include_abs:
                vals.append(repr(row.abs_pairing_max_err))
            vals.append(flags)
            lines.append(",".join(vals))
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "rows": [
                {
                    "n": row.n,
                    "sup_err": row.sup_err,
                    "norm_errs": dict(row.norm_errs),
                    "pairing_errs": list(row.pairing_errs),
                    "pairing_max_err": row.pairing_max_err,
                    "abs_pairing_errs": (
                        None
                        if row.abs_pairing_errs is None
                        else list(row.abs_pairing_errs)
                    ),
                    "abs_pairing_max_err": row.abs_pairing_max_err,
                }
                for row in self.rows
            ],
            "converged": dict(self.converged),
            "norm_names": list(self.norm_names),
            "meta": dict(self.meta),
            "tool_version": __version__,
        }


@dataclass
class VerificationReport:
    """Outcome of one lemma harness run.

    ``witnesses`` carries the constructive evidence (expressions, per-strike
    errors, per-trial checks) so a verdict can be audited without rerunning.
    """

    lemma: str
    trials: int
    passed: bool
    counterexample: dict | None = None
    witnesses: list = field(default_factory=list)
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "lemma": self.lemma,
            "trials": self.trials,
            "passed": self.passed,
            "witnesses": self.witnesses,
            "seed": self.seed,
            "meta": dict(self.meta),
            "tool_version": __version__,
        }
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out
