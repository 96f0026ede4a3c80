"""Kernel adaptive Bayesian filtering in a tensor-product RKHS.

A recursive estimator that learns an unknown nonlinear dynamical system as
a linear filter in feature space while simultaneously denoising its state,
plus classical EKF/CKF baselines, benchmark generators, and an experiment
CLI.
"""

__version__ = "0.1.0"

from .baselines import KnownSsm, ckf_step, ekf_step
from .filter import (CovarianceState, DivergenceError, FilterParams,
                     FunctionalBayesFilter, InferSession, StepResult, infer,
                     load_checkpoint, save_checkpoint, train_epochs)
from .itl import correntropy, information_potential, renyi_quadratic_entropy
from .kernels import KernelParams, gaussian_kernel, kernel_vector, tensor_kernel
from .model import (RkhsModel, load_model, measurement_select, save_model,
                    selector_matrix)
from .noise import NoiseSpec, add_noise
from .systems import ikeda, mackey_glass, robot_arm_forward

__all__ = [
    "CovarianceState", "DivergenceError", "FilterParams",
    "FunctionalBayesFilter", "InferSession", "KernelParams", "KnownSsm",
    "NoiseSpec", "RkhsModel", "StepResult", "add_noise", "ckf_step",
    "correntropy", "ekf_step", "gaussian_kernel", "ikeda", "infer",
    "information_potential", "kernel_vector", "load_checkpoint", "load_model",
    "mackey_glass", "measurement_select", "renyi_quadratic_entropy",
    "robot_arm_forward", "save_checkpoint", "save_model", "selector_matrix",
    "tensor_kernel", "train_epochs",
]
