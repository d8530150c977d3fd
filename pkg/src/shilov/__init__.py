"""Moving frames, connection forms and CR-map rigidity checks on Shilov
boundaries of type-I bounded symmetric domains."""

from .hermitian import (DEFAULT_TOL, DimensionError, SignatureForm, form_value,
                        gram_matrix, is_frame_group_element, reference_frame)
from .jets import ExteriorForm, Jet, JetContext, evaluate_at_origin, exterior_d, wedge
from .geometry import (BoundaryPoint, ChartField, chart_through, cr_tangent_basis,
                       in_domain, lie_transversal_basis, on_boundary,
                       random_chart_directions, sample_boundary)
from .frames import (AdaptedFrame, FrameChange, apply_change, build_adapted_frame,
                     change_matrix, solve_general_change_A)
from .connection import (ConnectionMatrix, check_structure_equations,
                         connection_from_frame_field, contact_modulo_reduction,
                         point_basis_decompose)
from .cartan import CartanReport, FormSystem, cartan_decompose, wedge_sum_residual
from .maps import (PolyMatrixMap, Term, block_diagonal_map, map_from_json,
                   map_to_json, standard_embedding, verify_boundary_preserving,
                   verify_cr, whitney_map)
from .rigidity import (ConjugatedMap, EquivalenceReport, NormalizationReport,
                       PlaneAnalysisReport, PullbackData, RigidityError,
                       automorphism_action, bound_holds, injectivity_witness,
                       normalize_step1, plane_analysis, pullback_forms,
                       random_automorphism, run_rigidity_pipeline,
                       solve_linear_equivalence, verify_aligned_state)

__version__ = "0.1.0"
