"""Architecture builders, weight transfer and input-domain translators."""
