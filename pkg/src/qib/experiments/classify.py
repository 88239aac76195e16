"""Kernel classification on a scrambled discrete source.

The generator hides a three-class structure inside 30 relabeled (x1, x2)
cells and blurs the integer coordinates with additive noise, so flooring
the observed reals yields up to 4 x 11 = 44 distinct cells.  A bottleneck
channel trained on the empirical cell/label source turns each cell into a
density operator feature; classification is one-vs-rest regularized least
squares with the Hilbert-Schmidt kernel Tr[sigma sigma'].  A classical
(diagonal) bottleneck and a plain linear kernel on the raw coordinates are
the comparison arms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .. import engine, rng
from ..exceptions import InvariantError
from ..linalg import diag_embed
from ..model import CQChannel, CQState, ObjectiveConfig

NUM_LABELS = 3
SIZE_X1 = 3
SIZE_X2 = 10
WIDE_NOISE = 1.2


@dataclass(frozen=True)
class LabeledDataset:
    """Samples of the classification task.

    ``rec_x1``/``rec_x2`` are the noiseless relabeled integer cells;
    ``x1_cont``/``x2_cont`` add the blurring noise; ``x1_cell``/``x2_cell``
    floor the continuous coordinates (the observable features).
    ``permutation`` maps structured cell index x1 * 10 + x2 to its
    relabeled index.
    """

    y: np.ndarray
    rec_x1: np.ndarray
    rec_x2: np.ndarray
    x1_cont: np.ndarray
    x2_cont: np.ndarray
    x1_cell: np.ndarray
    x2_cell: np.ndarray
    train_mask: np.ndarray
    permutation: np.ndarray

    @property
    def n_samples(self) -> int:
        return self.y.shape[0]


def gen_classifier_dataset(
    seed: int, n_samples: int = 400, train_fraction: float = 0.5
) -> LabeledDataset:
    """Draw one dataset: labels, scrambled cells, blurred coordinates.

    Per sample: y uniform on {0,1,2}; x1 = y; x2 | x1 has weight 2/11 on
    x2 = x1 and 1/11 elsewhere on {0..9}; the (x1, x2) cell is pushed
    through the inverse relabeling; both continuous coordinates add noise
    uniform on [0, 1.2) if the relabeled cell has x1 = 2 or x2 = 9 and
    [0, 1.0) otherwise.  Draw order (all vectorized): labels, the x2
    inversion uniforms, coordinate noise 1, coordinate noise 2.  The first
    round(train_fraction * n) samples are the training split (samples are
    iid, so a leading slice of seeded draws is already a random split).
    """
    if n_samples < 10:
        raise InvariantError(f"need at least 10 samples, got {n_samples}")
    if not 0.0 < train_fraction < 1.0:
        raise InvariantError(f"train_fraction must be in (0, 1), got {train_fraction}")
    gen = rng.derive_rng(seed, "classify-data")
    perm = gen.permutation(SIZE_X1 * SIZE_X2)
    inv = np.argsort(perm)

    y = gen.integers(0, NUM_LABELS, n_samples)
    weights = (1.0 + (np.arange(SIZE_X2)[None, :] == np.arange(SIZE_X1)[:, None])) / 11.0
    cdfs = np.cumsum(weights, axis=1)
    u = gen.random(n_samples)
    x2 = (u[:, None] > cdfs[y]).sum(axis=1)

    structured = y * SIZE_X2 + x2
    recorded = inv[structured]
    rec_x1, rec_x2 = np.divmod(recorded, SIZE_X2)

    width = np.where((rec_x1 == SIZE_X1 - 1) | (rec_x2 == SIZE_X2 - 1), WIDE_NOISE, 1.0)
    x1_cont = rec_x1 + gen.random(n_samples) * width
    x2_cont = rec_x2 + gen.random(n_samples) * width

    n_train = int(round(train_fraction * n_samples))
    train_mask = np.zeros(n_samples, dtype=bool)
    train_mask[:n_train] = True
    return LabeledDataset(
        y=y,
        rec_x1=rec_x1,
        rec_x2=rec_x2,
        x1_cont=x1_cont,
        x2_cont=x2_cont,
        x1_cell=np.floor(x1_cont).astype(np.int64),
        x2_cell=np.floor(x2_cont).astype(np.int64),
        train_mask=train_mask,
        permutation=perm,
    )


def _cell_keys(x1_cells: np.ndarray, x2_cells: np.ndarray) -> np.ndarray:
    return x1_cells.astype(np.int64) * 1000 + x2_cells.astype(np.int64)


def empirical_cq_state(
    x1_cells: np.ndarray,
    x2_cells: np.ndarray,
    labels: np.ndarray,
    num_labels: int = NUM_LABELS,
) -> tuple[CQState, np.ndarray]:
    """Empirical cell/label source from observed samples.

    Cells are the lexicographically sorted distinct (x1, x2) pairs; P_X
    carries their empirical frequencies and rho_{Y|cell} is the diagonal
    empirical label distribution within the cell.  Returns the state and
    the (m, 2) cell array defining the x index order.
    """
    x1_cells = np.asarray(x1_cells)
    x2_cells = np.asarray(x2_cells)
    labels = np.asarray(labels)
    if not (x1_cells.shape == x2_cells.shape == labels.shape) or labels.ndim != 1:
        raise InvariantError("cell and label arrays must be 1-d and equal length")
    if labels.size == 0:
        raise InvariantError("empirical state needs at least one sample")
    if labels.min() < 0 or labels.max() >= num_labels:
        raise InvariantError(
            f"labels must lie in [0, {num_labels}), got range "
            f"[{labels.min()}, {labels.max()}]"
        )
    keys = _cell_keys(x1_cells, x2_cells)
    unique_keys, idx = np.unique(keys, return_inverse=True)
    counts = np.zeros((unique_keys.size, num_labels))
    np.add.at(counts, (idx, labels), 1.0)
    totals = counts.sum(axis=1)
    px = totals / labels.size
    cond = counts / totals[:, None]
    rho = diag_embed(cond)
    cells = np.column_stack([unique_keys // 1000, unique_keys % 1000])
    return CQState(px, rho), cells


def hs_kernel(channel: CQChannel, i: int, j: int) -> float:
    """Hilbert-Schmidt kernel Tr[sigma_{T|i} sigma_{T|j}] between cells."""
    mats = channel.sigma_t_given_x
    return float(np.einsum("ij,ji->", mats[i], mats[j]).real)


def hs_gram(mats_a: np.ndarray, mats_b: np.ndarray) -> np.ndarray:
    """Pairwise Tr[A_i B_j] for stacked Hermitian features."""
    return np.einsum("aij,bji->ab", mats_a, mats_b, optimize=True).real


def train_classifier(
    gram: np.ndarray, labels: np.ndarray, num_classes: int, ridge: float = 1e-3
) -> tuple[np.ndarray, np.ndarray]:
    """One-vs-rest kernel ridge least squares.

    Solves (G + ridge I) a_c = z_c with z_c = +/-1 per class and offsets
    b_c as the mean residual.  Returns (coefficients (n, C), biases (C,)).
    """
    gram = np.asarray(gram, dtype=np.float64)
    n = gram.shape[0]
    if gram.shape != (n, n):
        raise InvariantError(f"gram must be square, got {gram.shape}")
    if ridge <= 0:
        raise InvariantError(f"ridge must be positive, got {ridge}")
    z = np.where(np.arange(num_classes)[None, :] == np.asarray(labels)[:, None], 1.0, -1.0)
    coef = np.linalg.solve(gram + ridge * np.eye(n), z)
    bias = np.mean(z - gram @ coef, axis=0)
    return coef, bias


def predict(cross_gram: np.ndarray, coef: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Argmax class scores for rows of a (m, n_train) cross-kernel matrix."""
    return np.argmax(cross_gram @ coef + bias[None, :], axis=1)


@dataclass(frozen=True)
class ClassifyReport:
    metrics: dict[str, float]
    dataset: LabeledDataset
    cells: np.ndarray
    quantum_channel: CQChannel
    classical_channel: CQChannel
    quantum_trace: engine.IterationTrace
    classical_trace: engine.IterationTrace
    test_predictions: dict[str, np.ndarray]
    region_rows: list[tuple[float, float, int, int, int]] | None


def _features(
    channel: CQChannel, cells: np.ndarray, x1c: np.ndarray, x2c: np.ndarray
) -> tuple[np.ndarray, int]:
    """Per-sample feature operators; unseen cells fall back to I/dimT."""
    cell_keys = _cell_keys(cells[:, 0], cells[:, 1])
    keys = _cell_keys(x1c, x2c)
    pos = np.searchsorted(cell_keys, keys)
    pos_clipped = np.minimum(pos, cell_keys.size - 1)
    seen = cell_keys[pos_clipped] == keys
    dt = channel.dim_t
    feats = np.empty((keys.size, dt, dt), dtype=np.complex128)
    feats[seen] = channel.sigma_t_given_x[pos_clipped[seen]]
    feats[~seen] = np.eye(dt, dtype=np.complex128) / dt
    n_unseen = int(np.sum(~seen))
    if n_unseen:
        warnings.warn(
            f"{n_unseen} sample(s) hit cells unseen in training; "
            "using the maximally mixed feature",
            RuntimeWarning,
            stacklevel=2,
        )
    return feats, n_unseen


def classify_pipeline(
    seed: int,
    alpha: float = 1.0,
    beta: float = 15.0,
    gamma: float | None = None,
    dim_t: int = 2,
    ridge: float = 1e-3,
    n_samples: int = 400,
    train_fraction: float = 0.5,
    tol: float = 1e-8,
    max_iters: int = 500,
    grid_step: float | None = None,
) -> ClassifyReport:
    """Full pipeline: dataset, empirical source, two bottleneck runs, three
    classifiers, test accuracies.

    The quantum and classical (diagonal-restricted) runs share every
    hyperparameter and the same run seed; the linear reference uses the raw
    continuous coordinates with the same ridge solver.  With ``grid_step``
    set, decision-region rows over the coordinate box are included.
    """
    ds = gen_classifier_dataset(seed, n_samples, train_fraction)
    tr = ds.train_mask
    te = ~tr
    state, cells = empirical_cq_state(ds.x1_cell[tr], ds.x2_cell[tr], ds.y[tr])

    run_seed = rng.derive_seed(seed, "classify-run")
    results = {}
    for name, classical in (("quantum", False), ("classical", True)):
        config = ObjectiveConfig(
            alpha=alpha, beta=beta, dim_t=dim_t, gamma=gamma,
            classical=classical, tol=tol, max_iters=max_iters, seed=run_seed,
        )
        results[name] = engine.run_qib(state, config)

    unseen_total = 0
    accs = {}
    preds = {}
    for name in ("quantum", "classical"):
        channel = results[name][0]
        f_tr, _ = _features(channel, cells, ds.x1_cell[tr], ds.x2_cell[tr])
        f_te, n_unseen = _features(channel, cells, ds.x1_cell[te], ds.x2_cell[te])
        unseen_total = max(unseen_total, n_unseen)
        coef, bias = train_classifier(hs_gram(f_tr, f_tr), ds.y[tr], NUM_LABELS, ridge)
        pred = predict(hs_gram(f_te, f_tr), coef, bias)
        preds[name] = pred
        accs[name] = float(np.mean(pred == ds.y[te]))

    coords = np.column_stack([ds.x1_cont, ds.x2_cont])
    g_lin = coords[tr] @ coords[tr].T
    coef_l, bias_l = train_classifier(g_lin, ds.y[tr], NUM_LABELS, ridge)
    pred_l = predict(coords[te] @ coords[tr].T, coef_l, bias_l)
    preds["linear"] = pred_l
    accs["linear"] = float(np.mean(pred_l == ds.y[te]))

    region_rows = None
    if grid_step is not None:
        if grid_step <= 0:
            raise InvariantError(f"grid_step must be positive, got {grid_step}")
        g1 = np.arange(0.0, SIZE_X1 + WIDE_NOISE, grid_step)
        g2 = np.arange(0.0, SIZE_X2 + WIDE_NOISE, grid_step)
        gx1, gx2 = [a.ravel() for a in np.meshgrid(g1, g2, indexing="ij")]
        cell1 = np.floor(gx1).astype(np.int64)
        cell2 = np.floor(gx2).astype(np.int64)
        grid_preds = {}
        for name in ("quantum", "classical"):
            channel = results[name][0]
            f_tr, _ = _features(channel, cells, ds.x1_cell[tr], ds.x2_cell[tr])
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                f_gr, _ = _features(channel, cells, cell1, cell2)
            coef, bias = train_classifier(
                hs_gram(f_tr, f_tr), ds.y[tr], NUM_LABELS, ridge
            )
            grid_preds[name] = predict(hs_gram(f_gr, f_tr), coef, bias)
        grid_coords = np.column_stack([gx1, gx2])
        grid_preds["linear"] = predict(grid_coords @ coords[tr].T, coef_l, bias_l)
        region_rows = [
            (
                float(gx1[i]),
                float(gx2[i]),
                int(grid_preds["quantum"][i]),
                int(grid_preds["classical"][i]),
                int(grid_preds["linear"][i]),
            )
            for i in range(gx1.size)
        ]

    metrics = {
        "f_quantum": results["quantum"][1].final_f,
        "f_classical": results["classical"][1].final_f,
        "acc_quantum": accs["quantum"],
        "acc_classical": accs["classical"],
        "acc_linear_ref": accs["linear"],
        "unseen_test_cells": float(unseen_total),
    }
    return ClassifyReport(
        metrics=metrics,
        dataset=ds,
        cells=cells,
        quantum_channel=results["quantum"][0],
        classical_channel=results["classical"][0],
        quantum_trace=results["quantum"][1],
        classical_trace=results["classical"][1],
        test_predictions={"y": ds.y[te], **preds},
        region_rows=region_rows,
    )
