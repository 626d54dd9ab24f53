//! Rationality-parameter inference for logit-QRE choice data.
//!
//! Each observation is one decision: a utility vector over the legal actions
//! (computed against a fitted opponent strategy), the chosen alternative and
//! the equilibrium prediction. Alternatives may group several actions, which
//! lets SC sender decisions be scored as bluff/honest.

mod bayes;
mod bic;
mod dataset;
mod likelihood;
mod report;
mod synthetic;

pub use bayes::{bayes_lambda, prior_sensitivity, BayesEstimate, PriorSensitivity, PriorSpec, GRID_STEP};
pub use bic::{bic_compare, BicEntry, BicModel, BicReport, NASH_FLOOR};
pub use dataset::{
    build_choice_dataset, build_choice_dataset_with, ChoiceDataset, ChoiceObs, DatasetOptions, DecisionKind,
    OpponentSummary,
};
pub use likelihood::{loglik, loglik_derivatives, mle_lambda, MleEstimate, LAMBDA_MAX, MLE_STARTS, WEAK_LAMBDA};
pub use report::{estimate_agent, write_estimates_csv, write_estimates_jsonl, LambdaEstimate};
pub use synthetic::{synthetic_dataset, Generator};
