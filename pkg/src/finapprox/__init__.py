"""Exact-arithmetic toolkit for finite approximations of real and p-adic
arithmetic: builders for truncated number systems, checkers for the grid
and near-homomorphism properties, a positive bounded formula language with
finite-model evaluation, refinement sweeps, and desk-scale experiments."""

from .algebra import (AlgebraFormatError, App, Const, FiniteAlgebra, OpTable,
                      RING_SIGNATURE, Signature, Var, corrupt_entry,
                      dumps_algebra)
from .ambient import (PadicAmbient, RealAmbient, real_with_unary,
                      recip_shifted_ambient_op, sin_ambient_op,
                      square_ambient_op)
from .approx import (ApproximationReport, MonotonePremiseError,
                     canonical_approximation, check_approximation,
                     check_grid, check_homomorphism,
                     check_restriction_monotone, perturbed_canonical)
from .decimalfp import (CancellationWitness, DecimalFP, FPParams,
                        UndecidableRounding, apq_params_for, build_apq,
                        cancellation_witness, fp_add, fp_div, fp_index,
                        fp_mul, fp_neg, fp_round, sufficient_params_inverse)
from .evaluate import (EvalResult, WitnessNode, brute_force_eval,
                       eval_finite, nearest_carrier_id, quantifier_domain)
from .exact import ExactScalar, as_fraction, cbrt_enclosure, sin_enclosure
from .experiments import (BUILTIN_FUNCTIONS, LinsysReport, PolyReport,
                          linsys_exact, linsys_experiment, poly_experiment)
from .families import (inverse_bounds, inverse_family, inverse_truth,
                       order_family, order_truth, threshold_family,
                       threshold_truth)
from .formulas import (Atom, Close, Eq, Formula, ParseError, Quant,
                       approximate, check_ll, check_regular, desugar_order,
                       eval_term_exact, format_formula, format_term,
                       parse_formula, parse_region, widen)
from .laws import (Assoc, Cancel, Comm, Distrib, Identity, Inverse,
                   LawViolation, abelian_group_report, law_search,
                   parse_law_name)
from .modular import ModularParams, build_modular, modular_params_for
from .padic_systems import (HmnParams, build_hmn, build_kn,
                            hmn_assoc_witness, hmn_bound_violations,
                            hmn_distrib_witness, hmn_iso_report)
from .padics import PadicDigits, entourage_exponent, fraction_norm
from .regions import (Entourage, Interval, PadicBall, Region, RegionUnion,
                      annulus, interval, region_contains)
from .rings import (EmbeddingSearchConfig, InfeasibleGridError, ProbeReport,
                    RingAxiomError, best_embedding_error, brute_force_embedding_error,
                    build_ring, gf, grid_control_units, probe_report,
                    product_ring, score_embedding, ut2, zn)
from .sweeps import LadderCell, SweepReport, standard_builders, sweep

__version__ = "0.1.0"
