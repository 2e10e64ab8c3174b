"""Agreement between detection methods and confidence calibration.

Two methods agree on a cell when their per-1,000-word frequencies differ
by less than 30% relative (both-zero counts as agreement). Calibration
bins predictions by confidence and compares mean confidence against
empirical accuracy (ECE).
"""

import numpy as np

from diachron import agreement, compare_methods, ece, pearson
from diachron.patterns import FeatureMatrix, MatrixMethod

print("agreement indicator:")
for fr, ft in [(10.0, 12.0), (5.0, 10.0), (0.0, 0.0), (0.0, 3.0)]:
    print(f"  f_regex={fr:>5} f_neural={ft:>5} -> {agreement(fr, ft)}")

rng = np.random.default_rng(42)
truth = rng.uniform(0, 20, (6, 10))
noisy = np.clip(truth * rng.uniform(0.85, 1.15, truth.shape), 0, None)
noisy[:, :2] = 0.0  # neural misses early texts entirely


def as_matrix(freq, method):
    return FeatureMatrix(
        method=method,
        texts=[f"t{j}" for j in range(freq.shape[1])],
        features=[f"f{i}" for i in range(freq.shape[0])],
        freq=freq,
        detected=freq > 0,
    )


report = compare_methods(as_matrix(truth, MatrixMethod.REGEX),
                         as_matrix(noisy, MatrixMethod.NEURAL))
print(f"\njoint-outcome agreement: {report.agreement_rate:.1%}"
      f" ({report.positive_agreements} positive, {report.negative_agreements} negative)")
print(f"frequency-indicator rate: {report.indicator_rate:.1%}")
print(f"frequency correlation r = {report.correlation:.3f}")

# Calibration: a well-calibrated predictor has small ECE.
n = 2000
confidences = rng.uniform(0, 1, n)
correct = rng.uniform(0, 1, n) < confidences  # accuracy tracks confidence
calibrated = ece(confidences.tolist(), correct.tolist(), bins=10)
overconfident = ece(
    np.clip(confidences + 0.3, 0, 1).tolist(), correct.tolist(), bins=10
)
print(f"\ncalibrated predictor:   ECE = {calibrated.ece:.3f},"
      f" bin-level r = {calibrated.pearson_r:.3f}")
print(f"overconfident variant:  ECE = {overconfident.ece:.3f}")
print("\nreliability diagram points (calibrated case):")
for b in calibrated.bins:
    if b.count:
        bar = "#" * int(40 * b.accuracy)
        print(f"  ({b.lower:.1f}, {b.upper:.1f}] n={b.count:<4}"
              f" conf={b.mean_confidence:.2f} acc={b.accuracy:.2f} {bar}")
