"""
config.py: Configuration values. Every numerical routine takes these as keyword defaults so experiments can override
them per call.
"""

import logging

LAB_NAME = "hblab"
LOG_LEVEL = logging.DEBUG
LOG_FILE_SUFFIX = ".log"  #: Log file is written next to the CSV output as <out>.log

#: Series kernel
RESCALE_THRESHOLD = 1e250  #: Rescale a series once any stored coefficient magnitude exceeds this
DEFAULT_TRUNCATION = 4096
MAX_EXACT_ORDER = 20_000  #: Largest order compare_exact will build with the O(T^2) recurrence
UNIT_CIRCLE_TOLERANCE = 1e-12

#: H(b) space
DEFAULT_GRAM_SIZE = 1024
KERNEL_TAIL_TOLERANCE = 1e-9

#: Pythagorean pairs
DEFAULT_GRID = 2**16
BOUNDARY_TOLERANCE = 1e-6
SINGULARITY_BAND = 0.1  #: Angular distance from a singularity of phi excluded from boundary checks
UNIMODULAR_ROOT_TOLERANCE = 1e-4  #: Denominator roots this close to the circle are treated as boundary poles

#: Operator norms and classification
POWER_ITERATION_TOLERANCE = 1e-8
POWER_ITERATION_MAX_ITERATIONS = 10_000
CLASSIFY_MINIMUM_TRUNCATION = 100
CLASSIFY_MARGIN = 0.05  #: Fitted exponents must clear each threshold by this much
STRETCHED_EXPONENT_BOUNDS = (0.01, 1.0)
STRETCHED_EXPONENT_FLOOR = 0.1  #: Below this, scale * n^delta is indistinguishable from a multiple of log n
STRETCHED_ADVANTAGE = 0.5  #: The stretched fit wins only with a residual below this fraction of the polynomial one
BOUNDED_SPREAD = 1e-12  #: Log-norm spread at or below this is classified as bounded

#: Saddle point solver
BISECTION_WIDTH = 1e-3
NEWTON_MAX_ITERATIONS = 200
SADDLE_RESIDUAL_TOLERANCE = 1e-12

#: Output
CSV_FLOAT_FORMAT = "%.17g"
DEFAULT_SEED = 42
