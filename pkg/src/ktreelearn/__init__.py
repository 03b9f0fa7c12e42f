"""Learning bounded tree-width graphical models from discrete distributions or samples."""

from .discrete import JointTable, VarSet, cond_mutual_info, entropy, kl_divergence, marginalize, validate
from .errors import KTreeLearnError, NoDecomposition
from .estimation import (
    EntropyOracle,
    EstimatorBudget,
    SampleSet,
    empirical_table,
    entropy_oracle,
    estimate_entropy,
    required_samples,
)
from .modelgen import (
    GeneratorSpec,
    draw_samples,
    generate_model,
    measure_alpha,
    random_factorizing_dist,
    random_ktree_td,
)
from .partitions import Partition, PartitionFamily, build_family, epsilon_partition, max_pairwise_cmi, refines
from .projection import (
    FactorizedModel,
    LearnConfig,
    learn,
    materialize,
    project,
    projection_divergence,
    projection_kl,
)
from .submodular import (
    MinCutResult,
    PendantPair,
    SetFunctionOracle,
    brute_force_minimize,
    info_cut_oracle,
    pendant_pair,
    queyranne_minimize,
)
from .treedecomp import (
    ChordalGraph,
    TreeDecomposition,
    compatible,
    edge_separators,
    find_compatible_td,
    td_to_chordal,
    validate_td,
)

__version__ = "0.1.0"
