"""Cavity-mediated Rydberg-Rydberg interactions in a microwave CPW resonator.

Layers:

* `qops`    - labeled operator algebra and the Lindblad integrator
* `cavity`  - the exact two-atom + cavity model and parameter recipes
* `effective` - eliminated-cavity quantities and the reduced models
* `device`  - SI pipeline from resonator geometry to dimensionless inputs
* `protocols` - blockade / entanglement / CPHASE / slow-light budgets
* `cli`     - scenario runner (`rydcav` command)
"""

from .cavity import (
    RegimeRecipe,
    SystemParams,
    apply_recipe,
    build_hamiltonian,
    collapse_operators,
    exchange_parameters,
    run_figure2,
    run_reduced,
    validate_regime,
)
from .device import DeviceParams, DerivedDevice, derive, to_system_params
from .effective import (
    FourthOrderQuantities,
    SecondOrderQuantities,
    ddi_effective_model,
    fourth_order,
    second_order,
    triplet,
    vdw_effective_model,
)
from .protocols import (
    BlockadeBudget,
    EnsembleParams,
    GateReport,
    PolaritonState,
    blockade_budget,
    ensemble_cphase,
    optical_depth,
    optimal_omega,
    photonic_cphase,
    polariton,
    two_ensemble_entanglement,
)
from .qops import (
    BasisSpec,
    DensityMatrix,
    IntegratorOpts,
    Operator,
    Trajectory,
    eig_hermitian,
    evolve,
    kron3,
    lindblad_rhs,
)
from .timeseries import PairTrajectory

__version__ = "0.1.0"

__all__ = [
    "BasisSpec", "Operator", "DensityMatrix", "IntegratorOpts", "Trajectory",
    "kron3", "lindblad_rhs", "evolve", "eig_hermitian",
    "SystemParams", "RegimeRecipe", "apply_recipe", "build_hamiltonian",
    "collapse_operators", "exchange_parameters", "run_figure2", "run_reduced",
    "validate_regime",
    "SecondOrderQuantities", "FourthOrderQuantities", "second_order",
    "fourth_order", "triplet", "ddi_effective_model", "vdw_effective_model",
    "DeviceParams", "DerivedDevice", "derive", "to_system_params",
    "EnsembleParams", "BlockadeBudget", "PolaritonState", "GateReport",
    "blockade_budget", "optimal_omega", "two_ensemble_entanglement",
    "ensemble_cphase", "polariton", "photonic_cphase", "optical_depth",
    "PairTrajectory",
    "__version__",
]
