"""
Three servers, one colluder, one liar
=====================================

Two one-symbol messages ``a`` and ``b`` sit on three servers.  Any one server
may share what it sees with another, and one server may lie.  The user still
gets ``a`` back, and the servers learn nothing about which message was asked.
"""

import numpy as np

from byzspir import Dataset, SchemeParams, build_x_matrix, generate_answers
from byzspir.scheme import queries_from_secret
from byzspir.decoder import enumerate_candidates

# evaluation points (1, 2, 0) make the algebra easy to read by hand
params = SchemeParams.create(K=2, N=3, T=1, B=1, l=1, alpha=1, q=5,
                             lambdas=(1, 2, 0), allow_zero_lambda=True)
data = Dataset(np.array([[3], [4]]))      # a = 3, b = 4

###############################################################################
# The user draws a random row (u, v) and sends each server a shifted copy.
# Server 3 gets (u, v) itself; each query alone is uniform.

U = np.array([[2, 1]])
qa = queries_from_secret(params, 1, U)
print("queries\n", qa.queries)

###############################################################################
# The servers share one random symbol S.  With X = u a + v b + S, the answers
# are X + a, X + 2a and X.

S = np.array([[1]])
X = build_x_matrix(params, data, 1, qa.U, S)
answers = generate_answers(params, X).values
print("answers", answers[:, 0])

###############################################################################
# Server 2 lies.  Every guess of the liar gives one candidate for (X, a);
# the right guess recovers a = 3, and a hash the liar cannot see picks it.

received = answers.copy()
received[1] = (received[1] + 2) % 5
for cand in enumerate_candidates(params, received):
    print("liar guessed", cand.hypothesis, "-> X, a =", cand.x_hat[:, 0])
