import os

from hypothesis import settings

settings.register_profile('xy_gibbs', deadline=None, max_examples=50)
settings.register_profile('xy_gibbs_ci', deadline=None, max_examples=200)
settings.load_profile(os.environ.get('XY_GIBBS_HYPOTHESIS_PROFILE', 'xy_gibbs'))
