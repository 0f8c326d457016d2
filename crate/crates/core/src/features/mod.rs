//! Feature spaces: vocabulary + TF-IDF for text, PCA for precomputed embeddings.

mod pca;
mod sparse;
mod vocab;

pub use pca::{pca_fit, pca_transform, PcaModel};
pub use sparse::SparseVector;
pub use vocab::{build_vocabulary, idf, tfidf_vectorize, Vocabulary, VocabularyFile};

/// Which representation a classifier was trained on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Tfidf,
    EmbeddingPca,
}
