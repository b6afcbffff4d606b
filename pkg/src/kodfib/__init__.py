"""Surface bundles over surfaces through their homological monodromy, and the
obstructions that keep their fundamental groups from being Kodaira fibration groups."""

from .linalg import IntMatrix, SmithDecomposition, cokernel_structure, rank, snf
from .monodromy import (BundleSpec, CoinvariantsReport, DeclaredBlock, GeneratingSetRep,
                        SymplecticRep, build_w, build_z_gb, coinvariants, declared_ekkos,
                        evaluate_word, fiber_sum_with_product, kodaira_thurston_q, product_block,
                        restrict_to_cover, section_sum, trefoil_block, validate_rep)
from .obstructions import CheckConfig, Status, Verdict, cover_sweep, verdict
from .surface import CyclicCoverSpec, SurfacePresentation, Word, cover_genus, schreier_generators

__version__ = "0.1.0"
