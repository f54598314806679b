import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "frontwaves.settings")
django.setup()
