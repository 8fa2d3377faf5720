//! Random forest (CART, Gini) and one-vs-one SMO support vector machines,
//! variable importance, and model files.

mod forest;
mod importance;
mod model_io;
mod svm;
mod tree;

use rayon::prelude::*;

pub use forest::{bootstrap, rf_predict, rf_train, ForestFit, RandomForestModel, RfParams};
pub use importance::{accuracy_score, permutation_importance, rf_importance, ImportanceMethod, ImportanceReport};
pub use model_io::{load_model, model_from_text, model_to_text, save_model, Model, ModelBundle, ModelKind, FORMAT_VERSION};
pub use svm::{
    kernel_eval, kkt_residual, smo_train_binary, svm_predict, svm_train_multiclass, BinaryFit, BinaryMachine, Kernel,
    KernelChoice, PairDiagnostics, PairMachine, SmoParams, SvmFit, SvmModel, SvmParams,
};
pub use tree::{argmax, best_split, gini, grow_tree, Split, Tree, TreeNode, TreeParams, TIE_TOLERANCE};

use crate::error::Result;
use crate::features::FeatureMatrix;

/// Common prediction interface over trained models.
pub trait Classifier: Sync {
    fn n_features(&self) -> usize;

    fn class_names(&self) -> &[String];

    /// Predicted class and one vote score per class.
    fn scores(&self, x: &[f64]) -> Result<(usize, Vec<f64>)>;

    fn predict(&self, x: &[f64]) -> Result<usize> {
        self.scores(x).map(|(c, _)| c)
    }

    fn predict_matrix(&self, x: &FeatureMatrix) -> Result<Vec<usize>> {
        (0..x.n_rows).into_par_iter().map(|i| self.predict(x.row(i))).collect()
    }
}
