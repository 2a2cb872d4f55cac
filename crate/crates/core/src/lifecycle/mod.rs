//! Project lifecycle taxonomy, stage coverage, and phased snapshots.

mod diff;
mod snapshot;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::keyword::keyword_enum;
use crate::model::{Case, ElementKind};
use crate::Id;

pub use diff::{diff, diff_cases, ChangeSet, Changes, DiffError, ElementChange, FieldChange};
pub use snapshot::{snapshot, snapshot_at, Snapshot, SnapshotError, SnapshotLabel, DIGEST_ALGORITHM};

keyword_enum! {
    /// The thirteen project lifecycle stages.
    pub enum LifecycleStage {
        ProjectPlanning => "project_planning",
        ProblemFormulation => "problem_formulation",
        DataExtractionProcurement => "data_extraction_procurement",
        DataAnalysis => "data_analysis",
        PreprocessingFeatureEngineering => "preprocessing_feature_engineering",
        ModelSelection => "model_selection",
        ModelTraining => "model_training",
        ModelValidationTesting => "model_validation_testing",
        ModelReporting => "model_reporting",
        ModelProductionalization => "model_productionalization",
        UserTraining => "user_training",
        SystemUseMonitoring => "system_use_monitoring",
        ModelUpdatingDeprovisioning => "model_updating_deprovisioning",
    }
}

keyword_enum! {
    pub enum MacroStage {
        Design => "design",
        Development => "development",
        Deployment => "deployment",
    }
}

impl LifecycleStage {
    pub fn macro_stage(self) -> MacroStage {
        use LifecycleStage::*;
        match self {
            ProjectPlanning | ProblemFormulation | DataExtractionProcurement | DataAnalysis => MacroStage::Design,
            PreprocessingFeatureEngineering | ModelSelection | ModelTraining | ModelValidationTesting
            | ModelReporting => MacroStage::Development,
            ModelProductionalization | UserTraining | SystemUseMonitoring | ModelUpdatingDeprovisioning => {
                MacroStage::Deployment
            }
        }
    }

    pub fn title(self) -> &'static str {
        use LifecycleStage::*;
        match self {
            ProjectPlanning => "Project planning",
            ProblemFormulation => "Problem formulation",
            DataExtractionProcurement => "Data extraction or procurement",
            DataAnalysis => "Data analysis",
            PreprocessingFeatureEngineering => "Preprocessing and feature engineering",
            ModelSelection => "Model selection",
            ModelTraining => "Model training",
            ModelValidationTesting => "Model validation and testing",
            ModelReporting => "Model reporting",
            ModelProductionalization => "Model productionalization",
            UserTraining => "User training",
            SystemUseMonitoring => "System use and monitoring",
            ModelUpdatingDeprovisioning => "Model updating or deprovisioning",
        }
    }
}

/// Property claims per lifecycle stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coverage {
    /// All thirteen stages, zero counts included.
    pub counts: BTreeMap<LifecycleStage, usize>,
    pub untagged: Vec<Id>,
    pub uncovered: Vec<LifecycleStage>,
}

impl Coverage {
    pub fn covered(&self) -> usize {
        LifecycleStage::ALL.len() - self.uncovered.len()
    }
}

pub fn coverage(case: &Case) -> Coverage {
    let mut counts: BTreeMap<LifecycleStage, usize> = LifecycleStage::ALL.iter().map(|s| (*s, 0)).collect();
    let mut untagged = Vec::new();
    for e in case.elements().values().filter(|e| e.kind == ElementKind::PropertyClaim) {
        match e.stage {
            Some(s) => *counts.get_mut(&s).expect("all stages present") += 1,
            None => untagged.push(e.id.clone()),
        }
    }
    let uncovered = counts.iter().filter(|(_, n)| **n == 0).map(|(s, _)| *s).collect();
    Coverage { counts, untagged, uncovered }
}
