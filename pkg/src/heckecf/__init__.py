"""Exact nearest-multiple continued fractions for Hecke triangle groups.

Subpackages:
  field        -- arithmetic in Q(lambda_q) with certified sign decisions
  cf           -- expansion, evaluation, convergents, per-q constants
  grammar      -- forbidden-block scanning and value-preserving rewriting
  symbolic     -- Markov partitions, transition matrices, encode/decode
  natural_ext  -- two-sided domain, invertible shift, geodesic reduction
  transfer     -- truncated transfer operator and zeta-product numerics
  rosen        -- conversion to and from Rosen-style lambda-fractions
  cli          -- command-line front end (`hecke-cf`)
"""

__version__ = "0.1.0"
