"""Ordinary least squares with factor and interaction terms.

Covers the identity, log and power-transformed response fits, the profile
likelihood search for the power-transform exponent, and the residual
diagnostics exported for plotting.  Least squares is solved through a QR
factorization of the design matrix; rank deficiency is reported as an
error rather than silently dropping columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import betainc, ndtri

from .dataset import EncodedRecord
from .errors import DomainError, InsufficientDataError, SingularDesignError

BASE_PREDICTORS = ("st_kb", "st_ks", "st_k", "mol", "moist", "uw")
RESPONSE_TRANSFORMS = ("identity", "log", "boxcox")

# Display names used in printed equations and tables.
DISPLAY_NAMES = {
    "st_kb": "ST.KB",
    "st_ks": "ST.KS",
    "st_k": "ST.K",
    "mol": "Mol",
    "moist": "Moist",
    "uw": "Uw",
}


def display_name(term: str) -> str:
    return "*".join(DISPLAY_NAMES.get(f, f) for f in term.split(":"))


@dataclass(frozen=True)
class ModelSpec:
    """Response transform plus an ordered list of predictor terms.

    A term is either a base predictor name or a pairwise product written
    ``"a:b"``.  ``boxcox_lambda`` is required exactly when the transform is
    ``"boxcox"``.
    """

    terms: tuple[str, ...]
    response_transform: str = "identity"
    boxcox_lambda: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.response_transform not in RESPONSE_TRANSFORMS:
            raise ValueError(f"unknown response transform {self.response_transform!r}")
        if (self.response_transform == "boxcox") != (self.boxcox_lambda is not None):
            raise ValueError("boxcox_lambda must be given exactly for the boxcox transform")
        if len(set(self.terms)) != len(self.terms):
            raise ValueError("model terms must be unique")
        for term in self.terms:
            for factor in term.split(":"):
                if factor not in BASE_PREDICTORS:
                    raise ValueError(f"unknown predictor {factor!r} in term {term!r}")


def base_columns(records: Sequence[EncodedRecord]) -> dict[str, np.ndarray]:
    """Column arrays for every base predictor plus the response."""
    cols = {
        name: np.array([getattr(r, name) for r in records], dtype=float)
        for name in BASE_PREDICTORS
    }
    if records and records[0].er is not None:
        cols["er"] = np.array([r.er for r in records], dtype=float)
    return cols


def term_values(term: str, columns: dict[str, np.ndarray]) -> np.ndarray:
    """Evaluate a term name (base predictor or ``a:b`` product) on columns."""
    factors = term.split(":")
    values = columns[factors[0]]
    for factor in factors[1:]:
        values = values * columns[factor]
    return values


def design_matrix(
    records: Sequence[EncodedRecord], terms: Sequence[str]
) -> tuple[np.ndarray, list[str]]:
    """Intercept column followed by one column per term."""
    columns = base_columns(records)
    names = ["(Intercept)"] + [str(t) for t in terms]
    X = np.empty((len(records), len(terms) + 1), dtype=float)
    X[:, 0] = 1.0
    for j, term in enumerate(terms, start=1):
        X[:, j] = term_values(term, columns)
    return X, names


def transform_response(er: np.ndarray, spec: ModelSpec) -> np.ndarray:
    if spec.response_transform == "identity":
        return np.asarray(er, dtype=float)
    if np.any(er <= 0):
        raise DomainError("response transform requires strictly positive values")
    if spec.response_transform == "log":
        return np.log(er)
    lam = spec.boxcox_lambda
    if lam == 0:
        return np.log(er)
    return (np.power(er, lam) - 1.0) / lam


def inverse_transform(values: np.ndarray, spec: ModelSpec) -> np.ndarray:
    """Map fitted values back to the original response scale."""
    values = np.asarray(values, dtype=float)
    if spec.response_transform == "identity":
        return values
    if spec.response_transform == "log":
        return np.exp(values)
    lam = spec.boxcox_lambda
    if lam == 0:
        return np.exp(values)
    base = lam * values + 1.0
    return np.power(np.maximum(base, 0.0), 1.0 / lam)


def _qr_solve(X: np.ndarray, names: Sequence[str]) -> tuple[np.ndarray, np.ndarray]:
    """QR factorization with a rank check naming the collinear columns."""
    Q, R = np.linalg.qr(X)
    diag = np.abs(np.diag(R))
    tol = max(X.shape) * np.finfo(float).eps * (diag.max() if diag.size else 0.0)
    bad = [names[j] for j in range(len(diag)) if diag[j] <= tol]
    if bad:
        raise SingularDesignError(
            f"design matrix is rank deficient; collinear column(s): {', '.join(bad)}",
            columns=bad,
        )
    return Q, R


def _t_pvalues(t: np.ndarray, df: int) -> np.ndarray:
    """Two-sided p-values from the Student-t distribution with ``df`` dof."""
    x = df / (df + t * t)
    return betainc(df / 2.0, 0.5, x)


@dataclass
class LinearFit:
    """A least-squares fit on the (possibly transformed) response scale."""

    spec: ModelSpec
    names: list[str]
    coefficients: np.ndarray
    std_errors: np.ndarray
    t_values: np.ndarray
    p_values: np.ndarray
    fitted: np.ndarray
    residuals: np.ndarray
    r2: float
    adj_r2: float
    rss: float
    n: int

    @property
    def n_params(self) -> int:
        return len(self.coefficients)

    def predict_transformed(self, records: Sequence[EncodedRecord]) -> np.ndarray:
        X, _ = design_matrix(records, self.spec.terms)
        return X @ self.coefficients

    def predict(self, records: Sequence[EncodedRecord]) -> np.ndarray:
        """Predictions on the original response scale."""
        return inverse_transform(self.predict_transformed(records), self.spec)

    def summary_table(self) -> str:
        """Fixed-width coefficient table (name, estimate, std. error, t, p)."""
        width = max(len(n) for n in self.names) + 2
        header = (
            f"{'term':<{width}}{'estimate':>14}{'std.error':>14}{'t':>10}{'p':>12}"
        )
        lines = [header]
        for j, name in enumerate(self.names):
            lines.append(
                f"{name:<{width}}"
                f"{self.coefficients[j]:>14.5g}"
                f"{self.std_errors[j]:>14.4g}"
                f"{self.t_values[j]:>10.3f}"
                f"{self.p_values[j]:>12.4g}"
            )
        lines.append(
            f"n = {self.n}, R^2 = {self.r2:.4f}, adjusted R^2 = {self.adj_r2:.4f}"
        )
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "response_transform": self.spec.response_transform,
            "boxcox_lambda": self.spec.boxcox_lambda,
            "terms": list(self.spec.terms),
            "names": list(self.names),
            "coefficients": [float(c) for c in self.coefficients],
            "std_errors": [float(s) for s in self.std_errors],
            "r2": float(self.r2),
            "adj_r2": float(self.adj_r2),
            "rss": float(self.rss),
            "n": int(self.n),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "LinearFit":
        spec = ModelSpec(
            terms=tuple(doc["terms"]),
            response_transform=doc["response_transform"],
            boxcox_lambda=doc.get("boxcox_lambda"),
        )
        coef = np.asarray(doc["coefficients"], dtype=float)
        k = len(coef)
        return cls(
            spec=spec,
            names=list(doc["names"]),
            coefficients=coef,
            std_errors=np.asarray(doc.get("std_errors", [np.nan] * k), dtype=float),
            t_values=np.full(k, np.nan),
            p_values=np.full(k, np.nan),
            fitted=np.empty(0),
            residuals=np.empty(0),
            r2=float(doc.get("r2", np.nan)),
            adj_r2=float(doc.get("adj_r2", np.nan)),
            rss=float(doc.get("rss", np.nan)),
            n=int(doc.get("n", 0)),
        )


def fit_ols(data: Sequence[EncodedRecord], spec: ModelSpec) -> LinearFit:
    """Least-squares fit of the spec's terms to the transformed response."""
    X, names = design_matrix(data, spec.terms)
    n, k = X.shape
    if n <= k:
        raise InsufficientDataError(
            f"need more than {k} observations for {k} coefficients, got {n}"
        )
    er = np.array([r.er for r in data], dtype=float)
    y = transform_response(er, spec)

    Q, R = _qr_solve(X, names)
    coef = np.linalg.solve(R, Q.T @ y)
    fitted = X @ coef
    residuals = y - fitted
    rss = float(residuals @ residuals)
    tss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - rss / tss if tss > 0 else 0.0
    p = k - 1
    df = n - p - 1
    adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / df

    sigma2 = rss / df
    r_inv = np.linalg.solve(R, np.eye(k))
    xtx_inv_diag = np.sum(r_inv**2, axis=1)
    std_errors = np.sqrt(sigma2 * xtx_inv_diag)
    with np.errstate(divide="ignore", invalid="ignore"):
        t_values = np.where(std_errors > 0, coef / std_errors, np.inf)
    p_values = _t_pvalues(t_values, df)

    return LinearFit(
        spec=spec,
        names=names,
        coefficients=coef,
        std_errors=std_errors,
        t_values=t_values,
        p_values=p_values,
        fitted=fitted,
        residuals=residuals,
        r2=r2,
        adj_r2=adj_r2,
        rss=rss,
        n=n,
    )


@dataclass(frozen=True)
class BoxCoxResult:
    """Profile log-likelihood over a grid of transform exponents."""

    lambda_grid: np.ndarray
    profile_loglik: np.ndarray
    lambda_hat: float


def default_lambda_grid() -> np.ndarray:
    return np.round(np.arange(-200, 201) * 0.01, 10)


def boxcox_lambda(
    data: Sequence[EncodedRecord],
    spec: ModelSpec,
    grid: Sequence[float] | None = None,
) -> BoxCoxResult:
    """Profile-likelihood estimate of the power-transform exponent.

    For each grid value the response is power-transformed, the spec's
    linear model refit, and the profile log-likelihood
    -(n/2) log(RSS/n) + (lambda - 1) sum(log y) evaluated; the estimate is
    the grid argmax.  The design is factored once and reused.
    """
    lambdas = default_lambda_grid() if grid is None else np.asarray(list(grid), float)
    if lambdas.size == 0:
        raise DomainError("lambda grid must be non-empty")
    er = np.array([r.er for r in data], dtype=float)
    if np.any(er <= 0):
        raise DomainError("power transform requires strictly positive response values")

    X, names = design_matrix(data, spec.terms)
    n = X.shape[0]
    if n <= X.shape[1]:
        raise InsufficientDataError(
            f"need more than {X.shape[1]} observations, got {n}"
        )
    Q, _ = _qr_solve(X, names)
    log_er = np.log(er)
    sum_log = float(log_er.sum())

    loglik = np.empty(lambdas.size)
    for i, lam in enumerate(lambdas):
        z = log_er if lam == 0 else (np.power(er, lam) - 1.0) / lam
        resid = z - Q @ (Q.T @ z)
        rss = float(resid @ resid)
        loglik[i] = -0.5 * n * np.log(rss / n) + (lam - 1.0) * sum_log

    best = int(np.argmax(loglik))
    return BoxCoxResult(
        lambda_grid=lambdas, profile_loglik=loglik, lambda_hat=float(lambdas[best])
    )


@dataclass(frozen=True)
class DiagnosticsBundle:
    """Plot-ready pairs for residual, quantile and prediction diagnostics."""

    residual_vs_fitted: list[tuple[float, float]]
    qq: list[tuple[float, float]]
    predicted_vs_actual: list[tuple[float, float]]

    def to_csv_parts(self) -> dict[str, str]:
        """CSV text per plot, keyed by a file-name suffix."""

        def block(header: str, pairs: list[tuple[float, float]]) -> str:
            lines = [header]
            lines += [f"{a!r},{b!r}" for a, b in pairs]
            return "\n".join(lines) + "\n"

        return {
            "residuals_vs_fitted": block("fitted,residual", self.residual_vs_fitted),
            "qq": block("theoretical_quantile,sample_quantile", self.qq),
            "predicted_vs_actual": block("predicted,actual", self.predicted_vs_actual),
        }


def qq_pairs(standardized: np.ndarray) -> list[tuple[float, float]]:
    """Normal quantiles at (i - 0.5)/n against the sorted sample."""
    n = len(standardized)
    theoretical = ndtri((np.arange(1, n + 1) - 0.5) / n)
    ordered = np.sort(standardized)
    return list(zip(theoretical.tolist(), ordered.tolist()))


def make_bundle(
    fitted: np.ndarray,
    residuals: np.ndarray,
    predicted_original: np.ndarray,
    actual_original: np.ndarray,
    residual_scale: float | None = None,
) -> DiagnosticsBundle:
    """Assemble a diagnostics bundle from raw fit vectors."""
    scale = residual_scale
    if scale is None or scale == 0:
        scale = float(np.std(residuals, ddof=1)) or 1.0
    standardized = np.asarray(residuals, float) / scale
    return DiagnosticsBundle(
        residual_vs_fitted=list(
            zip(np.asarray(fitted, float).tolist(), np.asarray(residuals, float).tolist())
        ),
        qq=qq_pairs(standardized),
        predicted_vs_actual=list(
            zip(
                np.asarray(predicted_original, float).tolist(),
                np.asarray(actual_original, float).tolist(),
            )
        ),
    )


def diagnostics(fit: LinearFit, data: Sequence[EncodedRecord]) -> DiagnosticsBundle:
    """Residual-vs-fitted, normal Q-Q and predicted-vs-actual pairs.

    Residuals are standardized by the residual standard error; predictions
    are back-transformed to the original response scale.
    """
    er = np.array([r.er for r in data], dtype=float)
    df = fit.n - fit.n_params
    sigma = np.sqrt(fit.rss / df) if df > 0 else None
    return make_bundle(
        fitted=fit.fitted,
        residuals=fit.residuals,
        predicted_original=inverse_transform(fit.fitted, fit.spec),
        actual_original=er,
        residual_scale=sigma,
    )
