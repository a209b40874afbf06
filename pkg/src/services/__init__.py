"""Service modules for corpus statistics, embeddings, class models, training and metrics."""
