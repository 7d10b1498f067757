//! Improvement actions for everything a company has not implemented yet.

use serde::{Deserialize, Serialize};

use crate::catalog::{ActionCatalog, DimensionId};
use crate::submission::ValidatedSubmission;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recommendation {
    pub action_id: String,
    pub dimension: DimensionId,
    pub text: String,
}

/// One recommendation per unimplemented action, in dimension order
/// (human, economic, environmental) and then catalog order. No ranking.
pub fn recommend(submission: &ValidatedSubmission, catalog: &ActionCatalog) -> Vec<Recommendation> {
    catalog
        .actions()
        .filter(|(_, action)| !submission.implemented().contains(&action.id))
        .map(|(dimension, action)| Recommendation {
            action_id: action.id.clone(),
            dimension,
            text: action.recommendation.clone(),
        })
        .collect()
}
