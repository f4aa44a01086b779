use alloc::format;

use super::error::ModelError;

/// Architecture and initialization parameters of the classifier.
///
/// The defaults are the desk-scale stand-in for a large pretrained
/// encoder: 2 layers, 2 heads, 32-dimensional embeddings, maximum
/// sequence length 64.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelConfig {
    pub vocab_size: usize,
    pub embed_dim: usize,
    pub num_layers: usize,
    pub num_heads: usize,
    pub ffn_dim: usize,
    pub max_len: usize,
    pub num_classes: usize,
    pub seed: u64,
}

impl ModelConfig {
    /// Defaults with the dataset-dependent fields filled in.
    pub fn with_defaults(vocab_size: usize, num_classes: usize, seed: u64) -> Self {
        Self {
            vocab_size,
            embed_dim: 32,
            num_layers: 2,
            num_heads: 2,
            ffn_dim: 64,
            max_len: 64,
            num_classes,
            seed,
        }
    }

    pub fn head_dim(&self) -> usize {
        self.embed_dim / self.num_heads
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let fail = |reason: alloc::string::String| Err(ModelError::InvalidConfig(reason));
        if self.vocab_size < 3 {
            return fail(format!(
                "vocab_size must cover the 3 reserved ids, got {}",
                self.vocab_size
            ));
        }
        if self.embed_dim == 0 || self.num_heads == 0 {
            return fail("embed_dim and num_heads must be positive".into());
        }
        if !self.embed_dim.is_multiple_of(self.num_heads) {
            return fail(format!(
                "embed_dim {} not divisible by num_heads {}",
                self.embed_dim, self.num_heads
            ));
        }
        if self.num_layers == 0 {
            return fail("num_layers must be positive".into());
        }
        if self.ffn_dim == 0 {
            return fail("ffn_dim must be positive".into());
        }
        if self.max_len < 2 {
            return fail(format!(
                "max_len must be at least 2 (CLS plus one token), got {}",
                self.max_len
            ));
        }
        if !(2..=5).contains(&self.num_classes) {
            return fail(format!("num_classes must be 2..=5, got {}", self.num_classes));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        ModelConfig::with_defaults(100, 5, 0).validate().unwrap();
    }

    #[test]
    fn divisibility_is_enforced() {
        let mut cfg = ModelConfig::with_defaults(100, 5, 0);
        cfg.embed_dim = 33;
        assert!(matches!(cfg.validate(), Err(ModelError::InvalidConfig(_))));
    }

    #[test]
    fn class_count_bounds() {
        let mut cfg = ModelConfig::with_defaults(100, 5, 0);
        cfg.num_classes = 1;
        assert!(cfg.validate().is_err());
        cfg.num_classes = 6;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn max_len_floor() {
        let mut cfg = ModelConfig::with_defaults(100, 2, 0);
        cfg.max_len = 1;
        assert!(cfg.validate().is_err());
    }
}
