"""Independent reference implementations used as test oracles.

They are deliberately naive (explicit loops, exhaustive enumeration) and
share no code with the package.
"""
import itertools
import math


def brute_force_assignment(cost):
    """Minimum of sum_i cost[i][p(i)] over all permutations, by enumeration."""
    n = len(cost)
    best = math.inf
    for p in itertools.permutations(range(n)):
        total = 0
        for i in range(n):
            total += cost[i][p[i]]
        if total < best:
            best = total
    return best


def _dist(u, v):
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(u, v)))


def dcov_sq_double_sum(x, y):
    """V-statistic dCov^2 via S1 + S2 - 2 S3 on raw pairwise distances."""
    n = len(x)
    a = [[_dist(x[i], x[j]) for j in range(n)] for i in range(n)]
    b = [[_dist(y[i], y[j]) for j in range(n)] for i in range(n)]
    s1 = sum(a[i][j] * b[i][j] for i in range(n) for j in range(n)) / n ** 2
    s2 = (sum(map(sum, a)) / n ** 2) * (sum(map(sum, b)) / n ** 2)
    s3 = 0.0
    for i in range(n):
        ra = sum(a[i])
        rb = sum(b[i])
        s3 += ra * rb
    s3 /= n ** 3
    return s1 + s2 - 2.0 * s3


def classical_center_outward_ranks(x):
    """Center-outward ranks on the line: observation with order statistic k of n
    gets rank ceil(|2k - n - 1| / 2); ranks are 0 only for the median of odd n."""
    n = len(x)
    order = sorted(range(n), key=lambda i: x[i])
    ranks = [0] * n
    for k, i in enumerate(order, start=1):
        ranks[i] = math.ceil(abs(2 * k - n - 1) / 2)
    return ranks
