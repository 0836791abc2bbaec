//! Fixtures shared by the benchmarks.

use slaas_core::{DecisionSpace, ResourceModel};

/// The 10-state, 12-bit reference setting.
pub fn small_setting() -> (ResourceModel, DecisionSpace) {
    let model =
        ResourceModel::single_resource(1.0, vec![0.3, 0.3], vec![2.0, 1.0]).expect("valid model");
    let (_, dspace) = DecisionSpace::from_model(&model);
    (model, dspace)
}

/// The 595-state, 1122-bit fine-grained setting.
pub fn large_setting() -> (ResourceModel, DecisionSpace) {
    let model =
        ResourceModel::single_resource(1.0, vec![0.03, 0.03], vec![0.2, 0.1]).expect("valid model");
    let (_, dspace) = DecisionSpace::from_model(&model);
    (model, dspace)
}
