# Core numerics: exact moments, oracles, generating functions, rate functions
