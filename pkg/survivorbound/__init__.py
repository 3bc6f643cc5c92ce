"""survivorbound: always-survivor causal effects under truncation by death and censoring."""
