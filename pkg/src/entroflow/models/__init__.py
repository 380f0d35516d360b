"""Built-in Hamiltonian-entropy systems."""
from .config import ModelConfig, build_system, load_config, parse_config
from .curie_weiss import G1, G2, curie_weiss, curie_weiss_two_state
from .hypercube import hypercube
from .jump_chain import MLSIComparison, detailed_balance_defect, dirichlet_form, jump_chain, mlsi_compare
from .langevin import in_omega, in_omega_beta, langevin
from .levy import levy_remark
from .ou import ornstein_uhlenbeck
from .potential import Potential, parse_potential
from .wright_fisher import wright_fisher, wright_fisher_1d

__all__ = [
    "G1", "G2", "MLSIComparison", "ModelConfig", "build_system", "load_config", "parse_config", "Potential", "curie_weiss", "curie_weiss_two_state",
    "detailed_balance_defect", "dirichlet_form", "hypercube", "in_omega", "in_omega_beta",
    "jump_chain", "langevin", "levy_remark", "mlsi_compare", "ornstein_uhlenbeck",
    "parse_potential", "wright_fisher", "wright_fisher_1d",
]
