# Nonlocal mKdV scattering toolkit
