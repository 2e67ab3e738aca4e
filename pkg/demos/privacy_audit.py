"""
Auditing privacy by brute force
===============================

On a field of three or five elements every random choice can be listed, so
privacy can be checked exactly instead of argued.
"""

from byzspir import SchemeParams
from byzspir import privacy

###############################################################################
# User privacy: the view of any one server does not depend on the index.

inst = privacy.AuditInstance(SchemeParams.create(K=2, N=3, T=1, B=1, l=1, alpha=1, q=5))
print("distance between index 1 and 2:", privacy.audit_user_privacy_exhaustive(inst, 1, 2))

# drop the user's randomness and the index shows through
print("without randomness:",
      privacy.audit_user_privacy_exhaustive(inst, 1, 2, variant="leaky_queries"))

###############################################################################
# Database privacy: the user learns nothing about the other message.

params = SchemeParams.create(K=2, N=3, T=1, B=1, l=1, alpha=1, q=3,
                             lambdas=(1, 2, 0), allow_zero_lambda=True)
inst = privacy.AuditInstance(params)
r = privacy.audit_database_privacy_exhaustive(inst, 1)
print("mutual information:", r.mutual_information, "over", r.states, "states")

# without the servers' shared randomness it leaks
r = privacy.audit_database_privacy_exhaustive(inst, 1, variant="unmasked")
print("unmasked:", round(r.mutual_information, 3))
